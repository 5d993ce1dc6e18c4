import { describe, expect, it } from 'vitest';

import {
  lowercase,
  piecesPerWord,
  subwordTokens,
  wordTokens,
} from '../src/tokenize.js';

describe('word tokenizer', () => {
  it('lowercases and splits on non-alphanumerics, keeping digits', () => {
    const lowered = lowercase('The CAT sat, 42 times!');
    const words = wordTokens(lowered).map((w) => w.text);
    expect(words).toEqual(['the', 'cat', 'sat', '42', 'times']);
  });

  it('treats underscores as separators', () => {
    const words = wordTokens(lowercase('ok_now foo_bar')).map((w) => w.text);
    expect(words).toEqual(['ok', 'now', 'foo', 'bar']);
  });

  it('reports correct character offsets', () => {
    const lowered = lowercase('ab  cde-f');
    const words = wordTokens(lowered);
    expect(words).toEqual([
      { text: 'ab', start: 0, end: 2 },
      { text: 'cde', start: 4, end: 7 },
      { text: 'f', start: 8, end: 9 },
    ]);
  });
});

describe('sub-word pieces', () => {
  it('cuts long words into pieces of at most four characters', () => {
    const pieces = subwordTokens('unbelievable').map((p) => p.text);
    expect(pieces).toEqual(['unbe', 'liev', 'able']);
  });

  it('keeps offsets aligned with the source text', () => {
    const lowered = 'storms gather';
    for (const piece of subwordTokens(lowered)) {
      expect(lowered.slice(piece.start, piece.end)).toBe(piece.text);
    }
  });

  it('maps every word to its own pieces and nothing else', () => {
    const lowered = lowercase('Unbelievable storms gather quickly');
    const words = wordTokens(lowered);
    const pieces = subwordTokens(lowered);
    const perWord = piecesPerWord(words, pieces);
    expect(perWord.length).toBe(words.length);
    const reconstructed = perWord.map((idxs, w) =>
      idxs.map((i) => pieces[i].text).join(''),
    );
    expect(reconstructed).toEqual(words.map((w) => w.text));
  });
});
