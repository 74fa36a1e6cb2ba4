/**
 * Labeled 2-D scatter rendering for embedding projections: a PNG image plus a
 * coordinates CSV so the layout is reproducible without re-running t-SNE.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { EmbeddingRow } from './average.js';
import { Raster, encodePng } from './png.js';
import { TooFewRowsError, TsneOptions, tsne } from './tsne.js';

export { TooFewRowsError } from './tsne.js';

// 5x7 glyphs, one byte per row, low 5 bits used; lowercase maps onto A-Z.
const FONT: Record<string, number[]> = {
  a: [0x0e, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11],
  b: [0x1e, 0x11, 0x11, 0x1e, 0x11, 0x11, 0x1e],
  c: [0x0e, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0e],
  d: [0x1e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1e],
  e: [0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f],
  f: [0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x10],
  g: [0x0e, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0e],
  h: [0x11, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11],
  i: [0x0e, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e],
  j: [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0c],
  k: [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
  l: [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1f],
  m: [0x11, 0x1b, 0x15, 0x15, 0x11, 0x11, 0x11],
  n: [0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11],
  o: [0x0e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e],
  p: [0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10, 0x10],
  q: [0x0e, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0d],
  r: [0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11],
  s: [0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e],
  t: [0x1f, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
  u: [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e],
  v: [0x11, 0x11, 0x11, 0x11, 0x11, 0x0a, 0x04],
  w: [0x11, 0x11, 0x11, 0x15, 0x15, 0x1b, 0x11],
  x: [0x11, 0x11, 0x0a, 0x04, 0x0a, 0x11, 0x11],
  y: [0x11, 0x11, 0x0a, 0x04, 0x04, 0x04, 0x04],
  z: [0x1f, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1f],
  '0': [0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e],
  '1': [0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e],
  '2': [0x0e, 0x11, 0x01, 0x06, 0x08, 0x10, 0x1f],
  '3': [0x0e, 0x11, 0x01, 0x06, 0x01, 0x11, 0x0e],
  '4': [0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02],
  '5': [0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e],
  '6': [0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e],
  '7': [0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
  '8': [0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e],
  '9': [0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c],
  _: [0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1f],
  '-': [0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00],
  '.': [0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c],
  ' ': [0, 0, 0, 0, 0, 0, 0],
};

const PALETTE: [number, number, number][] = [
  [31, 119, 180], [255, 127, 14], [44, 160, 44], [214, 39, 40],
  [148, 103, 189], [140, 86, 75], [227, 119, 194], [127, 127, 127],
  [188, 189, 34], [23, 190, 207],
];

function drawText(raster: Raster, x: number, y: number, text: string): void {
  let cursor = x;
  for (const raw of text.toLowerCase()) {
    const glyph = FONT[raw] ?? FONT['.'];
    for (let row = 0; row < 7; row++) {
      for (let col = 0; col < 5; col++) {
        if ((glyph[row] >> (4 - col)) & 1) {
          raster.set(cursor + col, y + row, 60, 60, 60);
        }
      }
    }
    cursor += 6;
  }
}

export interface ScatterOptions {
  width?: number;
  height?: number;
  margin?: number;
}

export function renderScatter(
  rows: EmbeddingRow[],
  coords: number[][],
  options: ScatterOptions = {},
): Raster {
  const width = options.width ?? 800;
  const height = options.height ?? 600;
  const margin = options.margin ?? 40;
  const raster = new Raster(width, height);

  const xs = coords.map((c) => c[0]);
  const ys = coords.map((c) => c[1]);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const xSpan = xMax - xMin || 1;
  const ySpan = yMax - yMin || 1;

  coords.forEach(([cx, cy], i) => {
    const px = Math.round(margin + ((cx - xMin) / xSpan) * (width - 2 * margin));
    const py = Math.round(margin + ((cy - yMin) / ySpan) * (height - 2 * margin));
    const [r, g, b] = PALETTE[i % PALETTE.length];
    raster.fillRect(px - 2, py - 2, 5, 5, r, g, b);
    drawText(raster, px + 5, py - 3, rows[i].label);
  });
  return raster;
}

export interface TsnePlotResult {
  coords: number[][];
  pngPath: string;
  csvPath: string;
}

/** Project rows to 2-D with t-SNE, write the scatter PNG and coordinates CSV. */
export function tsnePlot(
  rows: EmbeddingRow[],
  pngPath: string,
  csvPath: string,
  options: TsneOptions & ScatterOptions = {},
): TsnePlotResult {
  if (rows.length < 3) throw new TooFewRowsError(rows.length);
  const coords = tsne(rows.map((r) => r.vector), options);
  const raster = renderScatter(rows, coords, options);
  fs.mkdirSync(path.dirname(pngPath), { recursive: true });
  fs.writeFileSync(pngPath, encodePng(raster));
  const csv = ['label,x,y']
    .concat(rows.map((row, i) => `${row.label},${coords[i][0]},${coords[i][1]}`))
    .join('\n');
  fs.mkdirSync(path.dirname(csvPath), { recursive: true });
  fs.writeFileSync(csvPath, csv + '\n');
  return { coords, pngPath, csvPath };
}
