/**
 * Readers for the artifacts the Python pipeline exports: path-set manifests,
 * per-function path-vector JSONL, and label sidecar JSONL.  The manifest fixes
 * the input dimension of the embedding network; the sidecar supplies labels.
 */

import * as fs from 'node:fs';

export type PathSetMode = 'NESTED' | 'SIMPLE';

export interface PathSetManifest {
  mode: PathSetMode;
  count: number;
  entries: string[];
  provenance: string;
}

export interface VectorRecord {
  source: string;
  func: string;
  mode: PathSetMode;
  dim: number;
  counts: Map<number, number>;
}

export interface SidecarEntry {
  source: string;
  func: string;
  method_name: string;
  return_type: string;
  package: string;
}

export interface LabeledVector {
  label: string;
  vector: VectorRecord;
}

const MANIFEST_HEADER = /^# wasmwalker-pathset v1 mode=(NESTED|SIMPLE) count=(\d+)$/;

export class ManifestFormatError extends Error {
  constructor(message: string, readonly line: number) {
    super(`${message} (line ${line})`);
    this.name = 'ManifestFormatError';
  }
}

export function parseManifest(text: string): PathSetManifest {
  const lines = text.split('\n');
  const header = lines[0] ?? '';
  const match = MANIFEST_HEADER.exec(header);
  if (!match) {
    throw new ManifestFormatError(`bad manifest header: ${JSON.stringify(header)}`, 1);
  }
  const mode = match[1] as PathSetMode;
  const count = Number(match[2]);
  let provenance = '';
  const entries: string[] = [];
  for (let i = 1; i < lines.length; i++) {
    const line = lines[i];
    if (line === '') continue;
    if (line.startsWith('#')) {
      const body = line.slice(1).trim();
      if (body.startsWith('provenance=')) provenance = body.slice('provenance='.length);
      continue;
    }
    const tab = line.indexOf('\t');
    if (tab < 1) {
      throw new ManifestFormatError(`expected 'index<TAB>path', got ${JSON.stringify(line)}`, i + 1);
    }
    const index = Number(line.slice(0, tab));
    const entry = line.slice(tab + 1);
    if (!Number.isInteger(index) || index !== entries.length + 1) {
      throw new ManifestFormatError(`index ${line.slice(0, tab)} out of order`, i + 1);
    }
    entries.push(entry);
  }
  if (entries.length !== count) {
    throw new ManifestFormatError(
      `header declares count=${count} but manifest holds ${entries.length} entries`, 1);
  }
  return { mode, count, entries, provenance };
}

export function loadManifest(path: string): PathSetManifest {
  return parseManifest(fs.readFileSync(path, 'utf-8'));
}

export function parseVectorsJsonl(text: string): VectorRecord[] {
  const records: VectorRecord[] = [];
  for (const line of text.split('\n')) {
    if (!line.trim()) continue;
    const obj = JSON.parse(line);
    const counts = new Map<number, number>();
    for (const [key, value] of Object.entries(obj.counts as Record<string, number>)) {
      counts.set(Number(key), value);
    }
    records.push({
      source: obj.source,
      func: String(obj.func),
      mode: obj.mode,
      dim: obj.dim,
      counts,
    });
  }
  return records;
}

export function loadVectors(path: string): VectorRecord[] {
  return parseVectorsJsonl(fs.readFileSync(path, 'utf-8'));
}

export function parseSidecarJsonl(text: string): SidecarEntry[] {
  const entries: SidecarEntry[] = [];
  for (const line of text.split('\n')) {
    if (!line.trim()) continue;
    const obj = JSON.parse(line);
    entries.push({
      source: obj.source,
      func: String(obj.func),
      method_name: obj.method_name ?? '',
      return_type: obj.return_type ?? '',
      package: obj.package ?? '',
    });
  }
  return entries;
}

export function loadSidecar(path: string): SidecarEntry[] {
  return parseSidecarJsonl(fs.readFileSync(path, 'utf-8'));
}

/** Join vectors with sidecar labels on (source, func); unlabeled vectors are dropped. */
export function joinLabels(
  vectors: VectorRecord[],
  sidecar: SidecarEntry[],
  labelKind: 'method_name' | 'return_type' = 'method_name',
): LabeledVector[] {
  const byKey = new Map<string, SidecarEntry>();
  for (const entry of sidecar) {
    byKey.set(JSON.stringify([entry.source, entry.func]), entry);
  }
  const joined: LabeledVector[] = [];
  for (const vector of vectors) {
    const entry = byKey.get(JSON.stringify([vector.source, vector.func]));
    if (!entry) continue;
    const label = labelKind === 'method_name' ? entry.method_name : entry.return_type;
    if (!label) continue;
    joined.push({ label, vector });
  }
  return joined;
}

/** Expand a sparse vector record (1-based indices) into a dense row. */
export function toDense(record: VectorRecord, dim?: number): number[] {
  const width = dim ?? record.dim;
  if (record.dim !== width) {
    throw new Error(`vector dim ${record.dim} does not match manifest dim ${width}`);
  }
  const dense = new Array<number>(width).fill(0);
  for (const [index, count] of record.counts) {
    if (index < 1 || index > width) {
      throw new Error(`vector index ${index} outside 1..${width}`);
    }
    dense[index - 1] = count;
  }
  return dense;
}
