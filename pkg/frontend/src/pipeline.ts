/**
 * The full preparation run: read vocabulary and raw documents, emit every
 * matrix the engine consumes, plus a meta record of encoders, library
 * versions, seeds, and warnings.
 *
 * Outputs in the target directory:
 *   word_emb.tntm          N x wordDim contextual word vectors
 *   word_emb_reduced.tntm  N x 15 UMAP-reduced word vectors
 *   eval_emb.tntm          N x evalDim word vectors from a second encoder
 *   doc_emb.tntm           M x docDim document vectors
 *   meta.json
 */

import { promises as fs } from 'node:fs';
import path from 'node:path';

import { documentVectors } from './docvecs.js';
import { HashContextEncoder } from './encoder.js';
import { writeMatrix } from './matrixfile.js';
import { DEFAULT_REDUCE, reduceEmbeddings, umapVersion } from './reduce.js';
import { CHUNK_PIECES, RawDoc, corpusWordVectors } from './wordvecs.js';

export interface PipelineOptions {
  vocabPath: string;
  docsPath: string;
  outDir: string;
  seed: number;
  wordDim?: number;
  evalDim?: number;
  docDim?: number;
  reducedDims?: number;
  chunkPieces?: number;
}

export interface PipelineMeta {
  vocabSize: number;
  documents: number;
  seed: number;
  chunkPieces: number;
  wordEncoder: { name: string; version: string; dim: number };
  evalEncoder: { name: string; version: string; dim: number };
  docEncoder: { name: string; version: string; dim: number };
  reduction: Record<string, unknown>;
  warnings: string[];
}

export async function readVocab(vocabPath: string): Promise<string[]> {
  let content = await fs.readFile(vocabPath, 'utf-8');
  if (content.endsWith('\n')) content = content.slice(0, -1);
  const tokens = content.split('\n');
  if (tokens.some((t) => t.length === 0)) {
    throw new Error(`${vocabPath}: empty vocabulary line`);
  }
  return tokens;
}

export async function readDocs(docsPath: string): Promise<RawDoc[]> {
  const content = await fs.readFile(docsPath, 'utf-8');
  const docs: RawDoc[] = [];
  for (const line of content.split('\n')) {
    if (!line.trim()) continue;
    const record = JSON.parse(line);
    if (typeof record.doc_id !== 'string' || typeof record.text !== 'string') {
      throw new Error(`${docsPath}: each line needs string "doc_id" and "text"`);
    }
    docs.push({ docId: record.doc_id, text: record.text });
  }
  if (docs.length === 0) throw new Error(`${docsPath}: no documents`);
  return docs;
}

export async function runPipeline(options: PipelineOptions): Promise<PipelineMeta> {
  const wordDim = options.wordDim ?? 768;
  const evalDim = options.evalDim ?? 384;
  const docDim = options.docDim ?? 384;
  const reducedDims = options.reducedDims ?? DEFAULT_REDUCE.dims;
  const chunk = options.chunkPieces ?? CHUNK_PIECES;

  const vocab = await readVocab(options.vocabPath);
  const docs = await readDocs(options.docsPath);
  await fs.mkdir(options.outDir, { recursive: true });

  // distinct seeds per encoder so the three spaces are independent
  const wordEncoder = new HashContextEncoder(wordDim, options.seed ^ 0x1, 'hash-context');
  const evalEncoder = new HashContextEncoder(evalDim, options.seed ^ 0x2, 'hash-context-eval');
  const docEncoder = new HashContextEncoder(docDim, options.seed ^ 0x3, 'hash-context-doc');

  const words = corpusWordVectors(docs, vocab, wordEncoder, chunk);
  await writeMatrix(path.join(options.outDir, 'word_emb.tntm'), words.matrix);

  const reduced = reduceEmbeddings(words.matrix, options.seed, {
    ...DEFAULT_REDUCE,
    dims: reducedDims,
  });
  await writeMatrix(path.join(options.outDir, 'word_emb_reduced.tntm'), reduced.matrix);

  const evals = corpusWordVectors(docs, vocab, evalEncoder, chunk);
  await writeMatrix(path.join(options.outDir, 'eval_emb.tntm'), evals.matrix);

  const docMatrix = documentVectors(docs, docEncoder, chunk);
  await writeMatrix(path.join(options.outDir, 'doc_emb.tntm'), docMatrix);

  const meta: PipelineMeta = {
    vocabSize: vocab.length,
    documents: docs.length,
    seed: options.seed,
    chunkPieces: chunk,
    wordEncoder: { name: wordEncoder.name, version: wordEncoder.version, dim: wordDim },
    evalEncoder: { name: evalEncoder.name, version: evalEncoder.version, dim: evalDim },
    docEncoder: { name: docEncoder.name, version: docEncoder.version, dim: docDim },
    reduction: { ...reduced.effective, libraryVersion: umapVersion() },
    warnings: [...words.warnings, ...evals.warnings.map((w) => `eval: ${w}`)],
  };
  await fs.writeFile(
    path.join(options.outDir, 'meta.json'),
    `${JSON.stringify(meta, null, 2)}\n`,
    'utf-8',
  );
  return meta;
}
