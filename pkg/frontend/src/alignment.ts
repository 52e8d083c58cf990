import type { AlignmentMap } from "./types.js";

/**
 * Check the alignment invariants: spans are contiguous runs of ascending
 * indices, mutually disjoint and ordered, and together with the reserved
 * positions they cover 0..max index without gaps.
 *
 * Returns the total subtoken count.
 */
export function validateAlignment(alignment: AlignmentMap, wordCount?: number): number {
  const { wordToSubtokens, reservedPositions } = alignment;
  if (wordCount !== undefined && wordToSubtokens.length !== wordCount) {
    throw new Error(
      `alignment has ${wordToSubtokens.length} word spans for ${wordCount} words`,
    );
  }
  const seen = new Set<number>();
  let previousEnd = -1;
  for (const [word, span] of wordToSubtokens.entries()) {
    for (const [offset, index] of span.entries()) {
      if (!Number.isInteger(index) || index < 0) {
        throw new Error(`word ${word}: bad subtoken index ${index}`);
      }
      if (offset > 0 && index !== span[offset - 1] + 1) {
        throw new Error(`word ${word}: span ${JSON.stringify(span)} is not contiguous`);
      }
      if (seen.has(index)) {
        throw new Error(`subtoken ${index} appears in more than one span`);
      }
      seen.add(index);
    }
    if (span.length > 0) {
      if (span[0] <= previousEnd) {
        throw new Error(`word ${word}: spans are out of order`);
      }
      previousEnd = span[span.length - 1];
    }
  }
  for (const index of reservedPositions) {
    if (!Number.isInteger(index) || index < 0) {
      throw new Error(`bad reserved position ${index}`);
    }
    if (seen.has(index)) {
      throw new Error(`reserved position ${index} overlaps a word span`);
    }
    seen.add(index);
  }
  const count = seen.size === 0 ? 0 : Math.max(...seen) + 1;
  if (seen.size !== count) {
    const missing = [];
    for (let i = 0; i < count; i++) if (!seen.has(i)) missing.push(i);
    throw new Error(`subtokens not covered by any span or reserved position: ${missing}`);
  }
  return count;
}

/**
 * Broadcast a word-level mask to subtoken level: every subtoken of a
 * masked word is masked (whole-word semantics), and reserved positions
 * are forced to 0 no matter what.
 */
export function expandMask(wordMask: number[], alignment: AlignmentMap): number[] {
  const tokenCount = validateAlignment(alignment, wordMask.length);
  const tokenMask = new Array<number>(tokenCount).fill(0);
  for (const [word, span] of alignment.wordToSubtokens.entries()) {
    if (wordMask[word]) {
      for (const index of span) tokenMask[index] = 1;
    }
  }
  for (const index of alignment.reservedPositions) tokenMask[index] = 0;
  return tokenMask;
}
