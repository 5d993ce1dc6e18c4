/**
 * Two tokenizers that must stay alignable by character offsets.
 *
 * The word tokenizer reproduces the engine's vocabulary rule: lowercase,
 * then every run of Unicode letters/digits is one token. The sub-word
 * tokenizer splits each such run into short pieces (the contextual encoder
 * operates on pieces, like sub-word transformer vocabularies do). Both
 * report spans into the same lowercased text, which is what occurrence
 * matching uses.
 */

export interface Span {
  text: string;
  start: number;
  end: number; // exclusive
}

const WORD_RE = /[\p{L}\p{N}]+/gu;

export function lowercase(text: string): string {
  return text.toLowerCase();
}

/** Engine-rule tokens with offsets into the lowercased text. */
export function wordTokens(loweredText: string): Span[] {
  const out: Span[] = [];
  for (const match of loweredText.matchAll(WORD_RE)) {
    out.push({
      text: match[0],
      start: match.index ?? 0,
      end: (match.index ?? 0) + match[0].length,
    });
  }
  return out;
}

export const MAX_PIECE_CHARS = 4;

/** Sub-word pieces: each word is cut into chunks of at most four chars. */
export function subwordTokens(loweredText: string): Span[] {
  const out: Span[] = [];
  for (const word of wordTokens(loweredText)) {
    for (let off = 0; off < word.text.length; off += MAX_PIECE_CHARS) {
      const end = Math.min(off + MAX_PIECE_CHARS, word.text.length);
      out.push({
        text: word.text.slice(off, end),
        start: word.start + off,
        end: word.start + end,
      });
    }
  }
  return out;
}

/** Indices of the sub-word pieces covered by each word span. */
export function piecesPerWord(words: Span[], pieces: Span[]): number[][] {
  const result: number[][] = words.map(() => []);
  let w = 0;
  for (let p = 0; p < pieces.length; p += 1) {
    while (w < words.length && words[w].end <= pieces[p].start) w += 1;
    if (w < words.length && pieces[p].start >= words[w].start && pieces[p].end <= words[w].end) {
      result[w].push(p);
    }
  }
  return result;
}
