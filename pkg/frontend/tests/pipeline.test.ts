import { execFileSync } from 'node:child_process';
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import path from 'node:path';

import { beforeAll, describe, expect, it } from 'vitest';

import { main } from '../src/cli.js';
import { PipelineMeta, runPipeline } from '../src/pipeline.js';

const DOCS = [
  { doc_id: 'd0', text: 'Rain and wind gather over the harbour tonight.' },
  { doc_id: 'd1', text: 'The harbour boats ride out the storm and the rain.' },
  { doc_id: 'd2', text: 'Bond markets rallied while traders watched yields.' },
  { doc_id: 'd3', text: 'Yields fell and bond traders cheered the rally.' },
  { doc_id: 'd4', text: 'Storm clouds and wind kept the boats in the harbour.' },
  { doc_id: 'd5', text: 'Traders weighed bond yields against market storms.' },
];

const VOCAB = [
  'boats',
  'bond',
  'harbour',
  'markets',
  'rain',
  'storm',
  'traders',
  'wind',
  'yields',
];

const VALIDATE = `
import sys
from tntm import tensorio
m = tensorio.read_matrix(sys.argv[1])
print(f"{m.shape[0]} {m.shape[1]}")
`;

function readShape(file: string): [number, number] {
  const out = execFileSync('python3', ['-c', VALIDATE, file], { encoding: 'utf-8' });
  const [rows, cols] = out.trim().split(' ').map(Number);
  return [rows, cols];
}

describe('full preparation pipeline', () => {
  let outDir: string;
  let meta: PipelineMeta;

  beforeAll(async () => {
    const dir = mkdtempSync(path.join(tmpdir(), 'embedprep-pipe-'));
    writeFileSync(path.join(dir, 'vocab.txt'), `${VOCAB.join('\n')}\n`);
    writeFileSync(
      path.join(dir, 'docs.jsonl'),
      DOCS.map((d) => JSON.stringify(d)).join('\n') + '\n',
    );
    outDir = path.join(dir, 'out');
    meta = await runPipeline({
      vocabPath: path.join(dir, 'vocab.txt'),
      docsPath: path.join(dir, 'docs.jsonl'),
      outDir,
      seed: 17,
      wordDim: 48,
      evalDim: 24,
      docDim: 24,
    });
  });

  it('emits all four matrices and they validate under the engine reader', () => {
    expect(readShape(path.join(outDir, 'word_emb.tntm'))).toEqual([9, 48]);
    expect(readShape(path.join(outDir, 'word_emb_reduced.tntm'))).toEqual([9, 15]);
    expect(readShape(path.join(outDir, 'eval_emb.tntm'))).toEqual([9, 24]);
    expect(readShape(path.join(outDir, 'doc_emb.tntm'))).toEqual([6, 24]);
  });

  it('writes a meta record with encoders, reduction settings, and versions', () => {
    const onDisk = JSON.parse(readFileSync(path.join(outDir, 'meta.json'), 'utf-8'));
    expect(onDisk.vocabSize).toBe(9);
    expect(onDisk.documents).toBe(6);
    expect(onDisk.seed).toBe(17);
    expect(onDisk.wordEncoder.dim).toBe(48);
    expect(onDisk.reduction.metric).toBe('cosine');
    expect(onDisk.reduction.minDist).toBe(0.001);
    expect(onDisk.reduction.libraryVersion).toMatch(/^\d+\.\d+\.\d+$/);
    expect(onDisk.warnings).toEqual(meta.warnings);
    expect(onDisk.warnings).toEqual([]);
  });

  it('feeds the engine: init consumes the reduced embeddings', () => {
    const engineOut = path.join(outDir, 'engine');
    execFileSync(
      'python3',
      [
        '-m', 'tntm.cli', 'init',
        '--vocab', path.join(path.dirname(outDir), 'vocab.txt'),
        '--word-emb', path.join(outDir, 'word_emb_reduced.tntm'),
        '--k', '2',
        '--seed', '3',
        '--out', engineOut,
      ],
      { encoding: 'utf-8' },
    );
    expect(existsSync(path.join(engineOut, 'init.ckpt'))).toBe(true);
  });
});

describe('command line', () => {
  it('runs end to end and reports output shapes', async () => {
    const dir = mkdtempSync(path.join(tmpdir(), 'embedprep-cli-'));
    writeFileSync(path.join(dir, 'vocab.txt'), `${VOCAB.join('\n')}\n`);
    writeFileSync(
      path.join(dir, 'docs.jsonl'),
      DOCS.map((d) => JSON.stringify(d)).join('\n') + '\n',
    );
    const code = await main([
      '--vocab', path.join(dir, 'vocab.txt'),
      '--docs', path.join(dir, 'docs.jsonl'),
      '--out', path.join(dir, 'out'),
      '--seed', '1',
      '--word-dim', '32',
      '--eval-dim', '16',
      '--doc-dim', '16',
    ]);
    expect(code).toBe(0);
    expect(existsSync(path.join(dir, 'out', 'word_emb.tntm'))).toBe(true);
    expect(existsSync(path.join(dir, 'out', 'meta.json'))).toBe(true);
  });

  it('missing inputs exit with code 2', async () => {
    const code = await main([
      '--vocab', '/nonexistent/vocab.txt',
      '--docs', '/nonexistent/docs.jsonl',
      '--out', path.join(tmpdir(), 'never'),
    ]);
    expect(code).toBe(2);
  });

  it('missing required flags exit with code 2', async () => {
    expect(await main(['--vocab', 'only.txt'])).toBe(2);
  });
});
