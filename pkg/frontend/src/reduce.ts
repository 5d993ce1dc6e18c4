/**
 * UMAP reduction of the word-embedding matrix.
 *
 * Settings: cosine metric, 15 output dimensions, 15 neighbours, minimum
 * distance 0.001, and a seeded generator. UMAP results are only
 * reproducible for a pinned library version, so the version and every
 * effective parameter are reported for the run's meta record.
 */

import { createRequire } from 'node:module';

import { UMAP } from 'umap-js';

import { Matrix, getRow, matrixOf } from './matrixfile.js';

const nodeRequire = createRequire(import.meta.url);

export interface ReduceSettings {
  dims: number;
  nNeighbors: number;
  minDist: number;
  seed: number;
}

export const DEFAULT_REDUCE: Omit<ReduceSettings, 'seed'> = {
  dims: 15,
  nNeighbors: 15,
  minDist: 0.001,
};

export interface ReduceResult {
  matrix: Matrix;
  effective: ReduceSettings & { metric: 'cosine'; library: string };
}

function cosineDistance(a: number[], b: number[]): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i += 1) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const denom = Math.sqrt(na) * Math.sqrt(nb);
  if (denom === 0) return 1.0;
  return 1.0 - dot / denom;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function umapVersion(): string {
  const pkg = nodeRequire('umap-js/package.json');
  return pkg.version as string;
}

export function reduceEmbeddings(
  matrix: Matrix,
  seed: number,
  settings: Omit<ReduceSettings, 'seed'> = DEFAULT_REDUCE,
): ReduceResult {
  const n = matrix.rows;
  if (n < 3) {
    throw new Error(`need at least 3 rows to reduce, got ${n}`);
  }
  // the neighbourhood size must stay below the number of points
  const nNeighbors = Math.min(settings.nNeighbors, n - 1);
  const umap = new UMAP({
    nComponents: settings.dims,
    nNeighbors,
    minDist: settings.minDist,
    distanceFn: cosineDistance,
    random: mulberry32(seed),
  });
  const data: number[][] = [];
  for (let i = 0; i < n; i += 1) data.push(Array.from(getRow(matrix, i)));
  const embedded = umap.fit(data);

  const out = matrixOf(n, settings.dims);
  for (let i = 0; i < n; i += 1) {
    const row = getRow(out, i);
    for (let q = 0; q < settings.dims; q += 1) row[q] = embedded[i][q];
  }
  return {
    matrix: out,
    effective: {
      dims: settings.dims,
      nNeighbors,
      minDist: settings.minDist,
      seed,
      metric: 'cosine',
      library: `umap-js`,
    },
  };
}
