/**
 * Acceptance checks for the model harness, run against the files the Python
 * pipeline actually exports (test/fixtures were produced by its CLI).
 */

import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';
import { fileURLToPath } from 'node:url';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { averageByLabel } from '../src/average.js';
import { main } from '../src/cli.js';
import { EMBEDDING_DIM, trainEmbedding } from '../src/embedding.js';
import { trainSeq2Seq } from '../src/seq2seq.js';

const FIXTURES = path.join(path.dirname(fileURLToPath(import.meta.url)), 'fixtures');

let tmp: string;

beforeAll(() => {
  tmp = fs.mkdtempSync(path.join(os.tmpdir(), 'harness-accept-'));
});

afterAll(() => {
  fs.rmSync(tmp, { recursive: true, force: true });
});

function rng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state * 1664525 + 1013904223) >>> 0;
    return state / 2 ** 32;
  };
}

describe('embedding network criterion', () => {
  it('dim-50 embeddings, normalized softmax, 3-class overfit >= 95% in < 2 min', async () => {
    const rand = rng(2025);
    const vectors: number[][] = [];
    const labels: string[] = [];
    for (let c = 0; c < 3; c++) {
      for (let s = 0; s < 50; s++) {
        vectors.push(
          Array.from({ length: 10 }, (_, d) => (d % 3 === c ? 5 : 0) + rand() - 0.5),
        );
        labels.push(`class_${c}`);
      }
    }
    const started = Date.now();
    const trained = await trainEmbedding(vectors, labels, { epochs: 60, seed: 1 });
    const elapsed = (Date.now() - started) / 1000;

    expect(trained.embeddings.every((row) => row.length === EMBEDDING_DIM)).toBe(true);
    for (const row of trained.probabilities) {
      expect(Math.abs(row.reduce((a, b) => a + b, 0) - 1)).toBeLessThan(1e-5);
    }
    expect(trained.trainAccuracy).toBeGreaterThanOrEqual(0.95);
    expect(elapsed).toBeLessThan(120);
    console.log(
      `PASS: embedding net: dim=${EMBEDDING_DIM}, softmax normalized, ` +
      `overfit acc=${trained.trainAccuracy.toFixed(3)} in ${elapsed.toFixed(1)}s`,
    );
  }, 180_000);
});

describe('toy seq2seq criterion', () => {
  it('copy-task top-1 >= 90% in < 10 min; top-5 >= top-1 on every run', async () => {
    const rand = rng(99);
    const tokens = ['local.get', 'local.set', 'i32.add', 'i32.const', 'drop', 'br'];
    const make = (n: number) => {
      const src: string[][] = [];
      const tgt: string[][] = [];
      for (let i = 0; i < n; i++) {
        const length = 3 + Math.floor(rand() * 4);
        const line = Array.from({ length }, () => tokens[Math.floor(rand() * tokens.length)]);
        src.push(line);
        tgt.push([line[0]]);
      }
      return { src, tgt };
    };
    const started = Date.now();
    const model = await trainSeq2Seq(make(300), { epochs: 40, seed: 11 });
    const evaluations = [model.evaluate(make(30), 5), model.evaluate(make(30), 5)];
    const elapsed = (Date.now() - started) / 1000;

    for (const result of evaluations) {
      expect(result.top5).toBeGreaterThanOrEqual(result.top1);
    }
    expect(evaluations[0].top1).toBeGreaterThanOrEqual(0.9);
    expect(elapsed).toBeLessThan(600);
    console.log(
      `PASS: seq2seq copy task: top1=${evaluations[0].top1.toFixed(3)} ` +
      `top5=${evaluations[0].top5.toFixed(3)} in ${elapsed.toFixed(1)}s`,
    );
  }, 600_000);
});

describe('end-to-end over exported artifacts', () => {
  it('train-embedding and tsne commands consume the pipeline exports', async () => {
    const out = path.join(tmp, 'run');
    const code = await main([
      'train-embedding',
      '--vectors', path.join(FIXTURES, 'vectors.jsonl'),
      '--manifest', path.join(FIXTURES, 'pathset_nested.txt'),
      '--sidecar', path.join(FIXTURES, 'labels.jsonl'),
      '--epochs', '5',
      '--out', out,
    ]);
    expect(code).toBe(0);
    const metrics = JSON.parse(fs.readFileSync(path.join(out, 'metrics.json'), 'utf-8'));
    expect(metrics.inputDim).toBe(6);
    expect(metrics.embeddingDim).toBe(EMBEDDING_DIM);
    const embeddings = fs.readFileSync(path.join(out, 'embeddings.csv'), 'utf-8')
      .trim().split('\n');
    expect(embeddings[0].split(',')).toHaveLength(51); // label + 50 values
    expect(embeddings).toHaveLength(3); // header + 2 labels

    // the tsne command needs >= 3 rows; synthesize a wider embeddings file
    const rows = ['label,' + Array.from({ length: 50 }, (_, i) => `e${i + 1}`).join(',')];
    const rand = rng(5);
    for (let i = 0; i < 8; i++) {
      rows.push(`fn_${i},` + Array.from({ length: 50 }, () => (rand() * 2).toFixed(5)).join(','));
    }
    const embPath = path.join(tmp, 'embeddings.csv');
    fs.writeFileSync(embPath, rows.join('\n') + '\n');
    const tsneOut = path.join(tmp, 'tsne-run');
    const tsneCode = await main(['tsne', '--embeddings', embPath, '--out', tsneOut, '--iterations', '200']);
    expect(tsneCode).toBe(0);
    expect(fs.existsSync(path.join(tsneOut, 'tsne.png'))).toBe(true);
    expect(fs.readFileSync(path.join(tsneOut, 'tsne.csv'), 'utf-8').trim().split('\n')).toHaveLength(9);
    console.log('PASS: harness CLI consumed manifest + vectors JSONL + sidecar end to end');
  }, 180_000);

  it('averaging feeds the plot rows (one row per label)', () => {
    const rows = averageByLabel([[1, 2], [3, 4], [5, 6]], ['a', 'a', 'b']);
    expect(rows).toEqual([
      { label: 'a', vector: [2, 3] },
      { label: 'b', vector: [5, 6] },
    ]);
  });
});
