/** Word-index to subtoken-index alignment for one tokenized sequence. */
export interface AlignmentMap {
  /**
   * For each word, the contiguous ascending subtoken indices it expands
   * to. A word may map to an empty span (dropped by the subword
   * tokenizer).
   */
  wordToSubtokens: number[][];
  /** Subtoken indices that must never be masked (delimiters, padding). */
  reservedPositions: number[];
}

/** Masking knobs for one document; mirrors the service request schema. */
export interface MaskPairConfig {
  /** Document id; with `seed` it fully determines every random draw. */
  id: string;
  seed?: number;
  encoderRatio?: number;
  decoderRatio?: number;
  sigma?: number;
}

/** Word-level result, field for field the CLI `mask-pair` JSONL schema. */
export interface WordMaskPair {
  id: string;
  words: string[];
  encoder_mask: number[];
  decoder_mask: number[];
  encoder_actions: string[];
  decoder_actions: string[];
  ami: number[];
}

/** Word-level pair broadcast to subtoken level. */
export interface TokenMaskPair {
  encoderMask: number[];
  decoderMask: number[];
  /** The word-level pair the token masks were expanded from. */
  wordPair: WordMaskPair;
}

export interface ServiceHealth {
  status: string;
  window: number;
  docs: number;
  words: number;
  vocabulary: number;
  lowercase: boolean;
}
