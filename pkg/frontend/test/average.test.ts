import { describe, expect, it } from 'vitest';

import { averageByLabel } from '../src/average.js';

describe('averageByLabel', () => {
  it('two identical vectors average to that vector', () => {
    const rows = averageByLabel([[1, 2, 3], [1, 2, 3]], ['f', 'f']);
    expect(rows).toEqual([{ label: 'f', vector: [1, 2, 3] }]);
  });

  it('v and -v average to zero', () => {
    const rows = averageByLabel([[2, -4], [-2, 4]], ['g', 'g']);
    expect(rows[0].vector).toEqual([0, 0]);
  });

  it('three labels produce three rows, sorted', () => {
    const rows = averageByLabel([[1], [2], [3]], ['c', 'a', 'b']);
    expect(rows.map((r) => r.label)).toEqual(['a', 'b', 'c']);
  });

  it('rejects mismatched lengths and empty input', () => {
    expect(() => averageByLabel([[1]], [])).toThrow();
    expect(() => averageByLabel([], [])).toThrow();
  });
});
