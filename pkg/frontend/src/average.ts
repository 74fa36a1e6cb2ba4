/** Per-label averaging of sample embeddings into one representative row each. */

export interface EmbeddingRow {
  label: string;
  vector: number[];
}

export function averageByLabel(embeddings: number[][], labels: string[]): EmbeddingRow[] {
  if (embeddings.length !== labels.length) {
    throw new Error(`got ${embeddings.length} embeddings for ${labels.length} labels`);
  }
  if (embeddings.length === 0) {
    throw new Error('need at least one sample per label');
  }
  const sums = new Map<string, { total: number[]; n: number }>();
  embeddings.forEach((vector, i) => {
    const label = labels[i];
    const bucket = sums.get(label);
    if (!bucket) {
      sums.set(label, { total: [...vector], n: 1 });
    } else {
      for (let d = 0; d < vector.length; d++) bucket.total[d] += vector[d];
      bucket.n += 1;
    }
  });
  return [...sums.entries()]
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([label, { total, n }]) => ({
      label,
      vector: total.map((value) => value / n),
    }));
}
