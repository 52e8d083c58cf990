export { expandMask, validateAlignment } from "./alignment.js";
export { BridgeHandle, connect, loadStats, type LoadStatsOptions } from "./client.js";
export type {
  AlignmentMap,
  MaskPairConfig,
  ServiceHealth,
  TokenMaskPair,
  WordMaskPair,
} from "./types.js";
