/**
 * Model-harness CLI over the files the Python pipeline exports.
 *
 *   train-embedding --vectors V.jsonl --manifest P.txt --sidecar L.jsonl --out DIR
 *   tsne            --embeddings DIR/embeddings.csv --out DIR
 *   train-seq2seq   --train-src S --train-tgt T --test-src S2 --test-tgt T2 --out DIR
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { averageByLabel } from './average.js';
import { loadParallel } from './data.js';
import { EMBEDDING_DIM, trainEmbedding } from './embedding.js';
import { joinLabels, loadManifest, loadSidecar, loadVectors, toDense } from './manifest.js';
import { tsnePlot } from './plot.js';
import { trainSeq2Seq } from './seq2seq.js';

interface Args {
  command: string;
  options: Map<string, string>;
}

function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  const options = new Map<string, string>();
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    if (!key.startsWith('--') || i + 1 >= rest.length) {
      throw new Error(`expected --key value pairs, got ${rest.slice(i).join(' ')}`);
    }
    options.set(key.slice(2), rest[i + 1]);
  }
  return { command: command ?? '', options };
}

function required(args: Args, key: string): string {
  const value = args.options.get(key);
  if (!value) throw new Error(`--${key} is required`);
  return value;
}

function numberOpt(args: Args, key: string, fallback: number): number {
  const raw = args.options.get(key);
  return raw === undefined ? fallback : Number(raw);
}

function writeEmbeddingsCsv(file: string, rows: { label: string; vector: number[] }[]): void {
  const header = ['label', ...Array.from({ length: EMBEDDING_DIM }, (_, i) => `e${i + 1}`)];
  const lines = [header.join(',')];
  for (const row of rows) {
    lines.push([row.label, ...row.vector.map((v) => v.toPrecision(8))].join(','));
  }
  fs.writeFileSync(file, lines.join('\n') + '\n');
}

export function readEmbeddingsCsv(file: string): { label: string; vector: number[] }[] {
  const lines = fs.readFileSync(file, 'utf-8').trim().split('\n');
  return lines.slice(1).map((line) => {
    const [label, ...values] = line.split(',');
    return { label, vector: values.map(Number) };
  });
}

async function cmdTrainEmbedding(args: Args): Promise<object> {
  const manifest = loadManifest(required(args, 'manifest'));
  const vectors = loadVectors(required(args, 'vectors'));
  const sidecar = loadSidecar(required(args, 'sidecar'));
  const labeled = joinLabels(vectors, sidecar);
  if (labeled.length === 0) throw new Error('no labeled vectors after the sidecar join');
  const dense = labeled.map((lv) => toDense(lv.vector, manifest.count));
  const labels = labeled.map((lv) => lv.label);
  const trained = await trainEmbedding(dense, labels, {
    epochs: numberOpt(args, 'epochs', 60),
    learningRate: numberOpt(args, 'learning-rate', 1e-3),
    dropoutRate: numberOpt(args, 'dropout', 0.2),
    seed: numberOpt(args, 'seed', 42),
  });
  const out = required(args, 'out');
  fs.mkdirSync(out, { recursive: true });
  const rows = averageByLabel(trained.embeddings, labels);
  writeEmbeddingsCsv(path.join(out, 'embeddings.csv'), rows);
  const metrics = {
    samples: labeled.length,
    classes: trained.classes.length,
    inputDim: manifest.count,
    embeddingDim: EMBEDDING_DIM,
    trainAccuracy: trained.trainAccuracy,
    epochs: trained.epochs,
  };
  fs.writeFileSync(path.join(out, 'metrics.json'), JSON.stringify(metrics, null, 2) + '\n');
  return { command: 'train-embedding', ...metrics };
}

function cmdTsne(args: Args): object {
  const rows = readEmbeddingsCsv(required(args, 'embeddings'));
  const out = required(args, 'out');
  const result = tsnePlot(rows, path.join(out, 'tsne.png'), path.join(out, 'tsne.csv'), {
    seed: numberOpt(args, 'seed', 1),
    perplexity: numberOpt(args, 'perplexity', 30),
    iterations: numberOpt(args, 'iterations', 500),
  });
  return { command: 'tsne', points: result.coords.length, png: result.pngPath, csv: result.csvPath };
}

async function cmdTrainSeq2Seq(args: Args): Promise<object> {
  const train = loadParallel(required(args, 'train-src'), required(args, 'train-tgt'));
  const test = loadParallel(required(args, 'test-src'), required(args, 'test-tgt'));
  const model = await trainSeq2Seq(train, {
    epochs: numberOpt(args, 'epochs', 40),
    hiddenSize: numberOpt(args, 'hidden', 64),
    seed: numberOpt(args, 'seed', 7),
  });
  const result = model.evaluate(test, 5);
  const out = required(args, 'out');
  fs.mkdirSync(out, { recursive: true });
  const metrics = { trainSamples: train.src.length, ...result };
  fs.writeFileSync(path.join(out, 'metrics.json'), JSON.stringify(metrics, null, 2) + '\n');
  return { command: 'train-seq2seq', ...metrics };
}

export async function main(argv: string[]): Promise<number> {
  const args = parseArgs(argv);
  try {
    let result: object;
    if (args.command === 'train-embedding') {
      result = await cmdTrainEmbedding(args);
    } else if (args.command === 'tsne') {
      result = cmdTsne(args);
    } else if (args.command === 'train-seq2seq') {
      result = await cmdTrainSeq2Seq(args);
    } else {
      console.error('usage: cli.js <train-embedding|tsne|train-seq2seq> [--key value ...]');
      return 2;
    }
    console.log(JSON.stringify(result));
    return 0;
  } catch (error) {
    console.error(String(error));
    return 2;
  }
}

const invokedDirectly =
  process.argv[1] && path.resolve(process.argv[1]) === new URL(import.meta.url).pathname;
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
