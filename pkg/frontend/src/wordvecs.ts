/**
 * Corpus-averaged contextual word vectors.
 *
 * Each vocabulary word's row is the arithmetic mean of its contextual
 * representations over every occurrence in every document chunk. Documents
 * are cut into chunks of at most 512 sub-word pieces (whole words are never
 * split across chunks; the final chunk is padded), and a word spanning
 * several pieces averages its piece vectors first. Occurrences are matched
 * to vocabulary entries by character offsets on the lowercased text.
 */

import { ContextEncoder } from './encoder.js';
import { Matrix, getRow, matrixOf } from './matrixfile.js';
import { Span, lowercase, piecesPerWord, subwordTokens, wordTokens } from './tokenize.js';

export interface RawDoc {
  docId: string;
  text: string;
}

export interface WordVectorsResult {
  matrix: Matrix;
  occurrences: number[];
  warnings: string[];
}

export const CHUNK_PIECES = 512;
export const PAD_PIECE = '[PAD]';

interface Chunk {
  pieces: string[];
  /** global piece index of the chunk's first piece */
  offset: number;
}

/** Group pieces into chunks of at most `size`, never splitting a word. */
export function chunkPieces(
  wordPieceIndex: number[][],
  pieces: Span[],
  size: number = CHUNK_PIECES,
): Chunk[] {
  const chunks: Chunk[] = [];
  let current: string[] = [];
  let offset = 0;
  const flush = () => {
    if (current.length > 0) {
      while (current.length < size) current.push(PAD_PIECE);
      chunks.push({ pieces: current, offset });
      offset += size;
    }
    current = [];
  };
  for (const pieceIdxs of wordPieceIndex) {
    if (pieceIdxs.length > size) {
      // pathological single word longer than a whole chunk: hard split
      flush();
      for (const idx of pieceIdxs) {
        if (current.length === size) flush();
        current.push(pieces[idx].text);
      }
      flush();
      continue;
    }
    if (current.length + pieceIdxs.length > size) flush();
    for (const idx of pieceIdxs) current.push(pieces[idx].text);
  }
  flush();
  return chunks;
}

export function corpusWordVectors(
  docs: RawDoc[],
  vocab: string[],
  encoder: ContextEncoder,
  chunkSize: number = CHUNK_PIECES,
): WordVectorsResult {
  const index = new Map<string, number>();
  vocab.forEach((token, i) => index.set(token, i));

  const sums = matrixOf(vocab.length, encoder.dim);
  const occurrences = new Array<number>(vocab.length).fill(0);

  for (const doc of docs) {
    const lowered = lowercase(doc.text);
    const words = wordTokens(lowered);
    const pieces = subwordTokens(lowered);
    const wordPieceIndex = piecesPerWord(words, pieces);
    const chunks = chunkPieces(wordPieceIndex, pieces, chunkSize);

    // encode chunk by chunk; vectors aligned with the chunked piece order
    const vectors: Float64Array[] = [];
    for (const chunk of chunks) {
      vectors.push(...encoder.encodeChunk(chunk.pieces));
    }
    // real pieces precede the padding in every chunk, so walking words in
    // order and consuming vectors sequentially reproduces the alignment
    const realCounts = chunks.map(
      (c) => c.pieces.filter((p) => p !== PAD_PIECE).length,
    );
    let chunkIdx = 0;
    let used = 0; // non-pad pieces consumed in the current chunk
    const nextVector = (): Float64Array => {
      while (used >= realCounts[chunkIdx]) {
        chunkIdx += 1;
        used = 0;
      }
      const v = vectors[chunkIdx * chunkSize + used];
      used += 1;
      return v;
    };

    for (let w = 0; w < words.length; w += 1) {
      const nPieces = wordPieceIndex[w].length;
      const acc = new Float64Array(encoder.dim);
      for (let p = 0; p < nPieces; p += 1) {
        const vec = nextVector();
        for (let q = 0; q < encoder.dim; q += 1) acc[q] += vec[q];
      }
      const at = index.get(words[w].text);
      if (at === undefined) continue;
      const row = getRow(sums, at);
      for (let q = 0; q < encoder.dim; q += 1) acc[q] /= nPieces;
      for (let q = 0; q < encoder.dim; q += 1) row[q] += acc[q];
      occurrences[at] += 1;
    }
  }

  const warnings: string[] = [];
  for (let i = 0; i < vocab.length; i += 1) {
    if (occurrences[i] === 0) {
      warnings.push(`word ${JSON.stringify(vocab[i])} never found; emitting a zero row`);
      continue;
    }
    const row = getRow(sums, i);
    for (let q = 0; q < encoder.dim; q += 1) row[q] /= occurrences[i];
  }
  return { matrix: sums, occurrences, warnings };
}
