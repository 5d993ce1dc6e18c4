#!/usr/bin/env node
/**
 * embedprep --vocab vocab.txt --docs docs.jsonl --out DIR [--seed N]
 *           [--word-dim 768] [--eval-dim 384] [--doc-dim 384] [--dims 15]
 *
 * docs.jsonl: one JSON object per line, {"doc_id": ..., "text": ...},
 * in corpus order (the same order the engine's corpus.jsonl uses).
 */

import process from 'node:process';

import { runPipeline } from './pipeline.js';

interface Args {
  vocab: string;
  docs: string;
  out: string;
  seed: number;
  wordDim: number;
  evalDim: number;
  docDim: number;
  dims: number;
}

function parseArgs(argv: string[]): Args {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith('--') || value === undefined) {
      throw new Error(`malformed arguments near ${key}`);
    }
    flags.set(key.slice(2), value);
  }
  const need = (name: string): string => {
    const v = flags.get(name);
    if (v === undefined) throw new Error(`missing required --${name}`);
    return v;
  };
  const num = (name: string, fallback: number): number => {
    const v = flags.get(name);
    if (v === undefined) return fallback;
    const parsed = Number(v);
    if (!Number.isFinite(parsed)) throw new Error(`--${name} must be a number`);
    return parsed;
  };
  return {
    vocab: need('vocab'),
    docs: need('docs'),
    out: need('out'),
    seed: num('seed', 0),
    wordDim: num('word-dim', 768),
    evalDim: num('eval-dim', 384),
    docDim: num('doc-dim', 384),
    dims: num('dims', 15),
  };
}

export async function main(argv: string[]): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`ERR Config: ${(err as Error).message}`);
    return 2;
  }
  try {
    const meta = await runPipeline({
      vocabPath: args.vocab,
      docsPath: args.docs,
      outDir: args.out,
      seed: args.seed,
      wordDim: args.wordDim,
      evalDim: args.evalDim,
      docDim: args.docDim,
      reducedDims: args.dims,
    });
    console.log(
      `wrote word_emb.tntm (${meta.vocabSize}x${meta.wordEncoder.dim}), ` +
        `word_emb_reduced.tntm (${meta.vocabSize}x${args.dims}), ` +
        `eval_emb.tntm (${meta.vocabSize}x${meta.evalEncoder.dim}), ` +
        `doc_emb.tntm (${meta.documents}x${meta.docEncoder.dim}) to ${args.out}`,
    );
    for (const warning of meta.warnings) console.warn(`warning: ${warning}`);
    return 0;
  } catch (err) {
    const error = err as NodeJS.ErrnoException;
    if (error.code === 'ENOENT' || error.code === 'EACCES') {
      console.error(`ERR IO: ${error.message}`);
      return 2;
    }
    console.error(`ERR Pipeline: ${error.message}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split('/').pop() ?? '');
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
