/**
 * Document vectors: mean-pooled contextual piece vectors, one row per
 * document in corpus order. Uses its own encoder instance so document and
 * word spaces stay independent.
 */

import { ContextEncoder } from './encoder.js';
import { Matrix, getRow, matrixOf } from './matrixfile.js';
import { CHUNK_PIECES, PAD_PIECE, RawDoc, chunkPieces } from './wordvecs.js';
import { lowercase, piecesPerWord, subwordTokens, wordTokens } from './tokenize.js';

export function documentVectors(
  docs: RawDoc[],
  encoder: ContextEncoder,
  chunkSize: number = CHUNK_PIECES,
): Matrix {
  const out = matrixOf(docs.length, encoder.dim);
  for (let d = 0; d < docs.length; d += 1) {
    const lowered = lowercase(docs[d].text);
    const words = wordTokens(lowered);
    const pieces = subwordTokens(lowered);
    const chunks = chunkPieces(piecesPerWord(words, pieces), pieces, chunkSize);
    const row = getRow(out, d);
    let count = 0;
    for (const chunk of chunks) {
      const vectors = encoder.encodeChunk(chunk.pieces);
      for (let i = 0; i < chunk.pieces.length; i += 1) {
        if (chunk.pieces[i] === PAD_PIECE) continue;
        const v = vectors[i];
        for (let q = 0; q < encoder.dim; q += 1) row[q] += v[q];
        count += 1;
      }
    }
    if (count > 0) {
      for (let q = 0; q < encoder.dim; q += 1) row[q] /= count;
    }
  }
  return out;
}
