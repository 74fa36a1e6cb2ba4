/**
 * Exact t-SNE for small row counts (one point per method-name label).
 *
 * Gaussian affinities with per-point bandwidth found by binary search on the
 * perplexity, Student-t low-dimensional kernel, gradient descent with
 * momentum and early exaggeration.  Deterministic for a fixed seed.
 */

export interface TsneOptions {
  perplexity?: number;
  iterations?: number;
  learningRate?: number;
  seed?: number;
}

export class TooFewRowsError extends Error {
  constructor(n: number) {
    super(`t-SNE needs at least 3 rows, got ${n}`);
    this.name = 'TooFewRowsError';
  }
}

/** mulberry32: tiny deterministic PRNG, good enough for layout init. */
function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a |= 0;
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussian(rng: () => number): number {
  let u = 0;
  let v = 0;
  while (u === 0) u = rng();
  while (v === 0) v = rng();
  return Math.sqrt(-2.0 * Math.log(u)) * Math.cos(2.0 * Math.PI * v);
}

function squaredDistances(data: number[][]): number[][] {
  const n = data.length;
  const d2: number[][] = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (let i = 0; i < n; i++) {
    for (let j = i + 1; j < n; j++) {
      let sum = 0;
      for (let k = 0; k < data[i].length; k++) {
        const diff = data[i][k] - data[j][k];
        sum += diff * diff;
      }
      d2[i][j] = sum;
      d2[j][i] = sum;
    }
  }
  return d2;
}

/** Row-wise conditional affinities at the bandwidth matching the perplexity. */
function affinities(d2: number[][], perplexity: number): number[][] {
  const n = d2.length;
  const target = Math.log(perplexity);
  const p: number[][] = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (let i = 0; i < n; i++) {
    let betaMin = -Infinity;
    let betaMax = Infinity;
    let beta = 1.0;
    for (let attempt = 0; attempt < 60; attempt++) {
      let sum = 0;
      for (let j = 0; j < n; j++) {
        p[i][j] = j === i ? 0 : Math.exp(-d2[i][j] * beta);
        sum += p[i][j];
      }
      if (sum === 0) sum = 1e-12;
      let entropy = 0;
      for (let j = 0; j < n; j++) {
        p[i][j] /= sum;
        if (p[i][j] > 1e-12) entropy -= p[i][j] * Math.log(p[i][j]);
      }
      const diff = entropy - target;
      if (Math.abs(diff) < 1e-5) break;
      if (diff > 0) {
        betaMin = beta;
        beta = betaMax === Infinity ? beta * 2 : (beta + betaMax) / 2;
      } else {
        betaMax = beta;
        beta = betaMin === -Infinity ? beta / 2 : (beta + betaMin) / 2;
      }
    }
  }
  return p;
}

export function tsne(data: number[][], options: TsneOptions = {}): number[][] {
  const n = data.length;
  if (n < 3) throw new TooFewRowsError(n);
  const perplexity = Math.max(1, Math.min(options.perplexity ?? 30, (n - 1) / 3));
  const iterations = options.iterations ?? 500;
  // gradients scale like 1/n, so small maps need a small step to stay stable
  const learningRate = options.learningRate ?? Math.max(2, n / 3);
  const rng = makeRng(options.seed ?? 1);

  const cond = affinities(squaredDistances(data), perplexity);
  // symmetrize and normalize
  const p: number[][] = Array.from({ length: n }, () => new Array<number>(n).fill(0));
  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      p[i][j] = Math.max((cond[i][j] + cond[j][i]) / (2 * n), 1e-12);
    }
  }

  const y: number[][] = Array.from({ length: n }, () => [
    gaussian(rng) * 1e-4,
    gaussian(rng) * 1e-4,
  ]);
  const velocity: number[][] = Array.from({ length: n }, () => [0, 0]);
  const gains: number[][] = Array.from({ length: n }, () => [1, 1]);

  const exaggerationUntil = 100;
  for (let iter = 0; iter < iterations; iter++) {
    const exaggeration = iter < exaggerationUntil ? 4 : 1;
    const momentum = iter < 250 ? 0.5 : 0.8;

    // Student-t kernel
    const num: number[][] = Array.from({ length: n }, () => new Array<number>(n).fill(0));
    let qSum = 0;
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const dx = y[i][0] - y[j][0];
        const dy = y[i][1] - y[j][1];
        const value = 1 / (1 + dx * dx + dy * dy);
        num[i][j] = value;
        num[j][i] = value;
        qSum += 2 * value;
      }
    }
    if (qSum === 0) qSum = 1e-12;

    for (let i = 0; i < n; i++) {
      let gradX = 0;
      let gradY = 0;
      for (let j = 0; j < n; j++) {
        if (j === i) continue;
        const q = Math.max(num[i][j] / qSum, 1e-12);
        const mult = (exaggeration * p[i][j] - q) * num[i][j];
        gradX += 4 * mult * (y[i][0] - y[j][0]);
        gradY += 4 * mult * (y[i][1] - y[j][1]);
      }
      const grad = [gradX, gradY];
      for (let d = 0; d < 2; d++) {
        gains[i][d] = Math.sign(grad[d]) === Math.sign(velocity[i][d])
          ? Math.max(gains[i][d] * 0.8, 0.01)
          : gains[i][d] + 0.2;
        velocity[i][d] = momentum * velocity[i][d] - learningRate * gains[i][d] * grad[d];
        y[i][d] += velocity[i][d];
      }
    }

    // re-center
    const mean = [0, 0];
    for (const point of y) {
      mean[0] += point[0] / n;
      mean[1] += point[1] / n;
    }
    for (const point of y) {
      point[0] -= mean[0];
      point[1] -= mean[1];
    }
  }
  return y;
}
