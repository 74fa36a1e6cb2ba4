/** Parallel src/tgt text loading and token vocabularies for the toy seq2seq. */

import * as fs from 'node:fs';

export class MisalignedFilesError extends Error {
  constructor(srcLines: number, tgtLines: number) {
    super(`src has ${srcLines} lines but tgt has ${tgtLines}`);
    this.name = 'MisalignedFilesError';
  }
}

export interface ParallelData {
  src: string[][];
  tgt: string[][];
}

function readLines(path: string): string[] {
  const text = fs.readFileSync(path, 'utf-8');
  const lines = text.split('\n');
  if (lines.length && lines[lines.length - 1] === '') lines.pop();
  return lines;
}

export function loadParallel(srcPath: string, tgtPath: string): ParallelData {
  const srcLines = readLines(srcPath);
  const tgtLines = readLines(tgtPath);
  if (srcLines.length !== tgtLines.length) {
    throw new MisalignedFilesError(srcLines.length, tgtLines.length);
  }
  return {
    src: srcLines.map((line) => line.split(/\s+/).filter(Boolean)),
    tgt: tgtLines.map((line) => line.split(/\s+/).filter(Boolean)),
  };
}

export const PAD = '<pad>';
export const SOS = '<sos>';
export const EOS = '<eos>';
export const UNK = '<unk>';

export class Vocab {
  readonly tokens: string[];
  private readonly index: Map<string, number>;

  constructor(tokens: Iterable<string>) {
    this.tokens = [PAD, SOS, EOS, UNK, ...[...new Set(tokens)].sort()];
    this.index = new Map(this.tokens.map((token, i) => [token, i]));
  }

  get size(): number {
    return this.tokens.length;
  }

  id(token: string): number {
    return this.index.get(token) ?? this.index.get(UNK)!;
  }

  token(id: number): string {
    return this.tokens[id] ?? UNK;
  }

  encode(tokens: string[], maxLen: number, opts: { sos?: boolean; eos?: boolean } = {}): number[] {
    const body = tokens.map((token) => this.id(token));
    const framed = [
      ...(opts.sos ? [this.id(SOS)] : []),
      ...body,
      ...(opts.eos ? [this.id(EOS)] : []),
    ].slice(0, maxLen);
    while (framed.length < maxLen) framed.push(this.id(PAD));
    return framed;
  }
}

export function buildVocab(lines: string[][]): Vocab {
  return new Vocab(lines.flat());
}
