/**
 * Contextual encoders behind one interface.
 *
 * The default implementation is fully offline and deterministic: every
 * sub-word piece gets a unit base vector seeded by a hash of its text, and
 * the contextual vector mixes the neighbouring pieces of the same chunk
 * with decaying weights. That gives the properties the pipeline needs
 * (context-dependent, chunk-local, reproducible) without downloading model
 * weights; a transformer-backed implementation can be swapped in through
 * the same interface where weights are available.
 */

export interface ContextEncoder {
  readonly name: string;
  readonly version: string;
  readonly dim: number;
  /** One vector per piece; context never crosses the chunk boundary. */
  encodeChunk(pieces: string[]): Float64Array[];
}

/** 32-bit FNV-1a */
function hash32(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i += 1) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193);
  }
  return h >>> 0;
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

function unitGaussianVector(dim: number, seed: number): Float64Array {
  const rand = mulberry32(seed);
  const out = new Float64Array(dim);
  for (let i = 0; i < dim; i += 2) {
    // Box-Muller; rand() is in [0, 1), shift away from zero for the log
    const u1 = 1.0 - rand();
    const u2 = rand();
    const r = Math.sqrt(-2.0 * Math.log(u1));
    out[i] = r * Math.cos(2.0 * Math.PI * u2);
    if (i + 1 < dim) out[i + 1] = r * Math.sin(2.0 * Math.PI * u2);
  }
  let norm = 0;
  for (const v of out) norm += v * v;
  norm = Math.sqrt(norm) || 1.0;
  for (let i = 0; i < dim; i += 1) out[i] /= norm;
  return out;
}

const MIX_WEIGHTS = [0.5, 0.25]; // neighbours at distance 1 and 2

export class HashContextEncoder implements ContextEncoder {
  readonly name: string;
  readonly version = '1';
  readonly dim: number;
  private readonly seed: number;
  private readonly baseCache = new Map<string, Float64Array>();

  constructor(dim: number, seed: number, name = 'hash-context') {
    this.dim = dim;
    this.seed = seed >>> 0;
    this.name = `${name}-${dim}`;
  }

  private base(text: string): Float64Array {
    let vec = this.baseCache.get(text);
    if (!vec) {
      vec = unitGaussianVector(this.dim, (hash32(text) ^ this.seed) >>> 0);
      this.baseCache.set(text, vec);
    }
    return vec;
  }

  encodeChunk(pieces: string[]): Float64Array[] {
    const bases = pieces.map((p) => this.base(p));
    return pieces.map((_, i) => {
      const out = Float64Array.from(bases[i]);
      for (let d = 1; d <= MIX_WEIGHTS.length; d += 1) {
        const w = MIX_WEIGHTS[d - 1];
        for (const j of [i - d, i + d]) {
          if (j >= 0 && j < bases.length) {
            const nb = bases[j];
            for (let q = 0; q < this.dim; q += 1) out[q] += w * nb[q];
          }
        }
      }
      let norm = 0;
      for (const v of out) norm += v * v;
      norm = Math.sqrt(norm) || 1.0;
      for (let q = 0; q < this.dim; q += 1) out[q] /= norm;
      return out;
    });
  }
}
