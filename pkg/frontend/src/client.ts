import { spawn, type ChildProcess } from "node:child_process";

import { expandMask } from "./alignment.js";
import type {
  AlignmentMap,
  MaskPairConfig,
  ServiceHealth,
  TokenMaskPair,
  WordMaskPair,
} from "./types.js";

async function postJson<T>(baseUrl: string, endpoint: string, payload: unknown): Promise<T> {
  const response = await fetch(baseUrl + endpoint, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
  if (!response.ok) {
    const body = await response.text();
    throw new Error(`pmimask service ${endpoint} failed (${response.status}): ${body}`);
  }
  return (await response.json()) as T;
}

/**
 * Handle to one running pmimask service (one loaded stats table).
 *
 * The underlying stats are immutable and shared by every request, so a
 * single handle can be used concurrently from many pipeline workers.
 */
export class BridgeHandle {
  private readonly process?: ChildProcess;

  constructor(
    public readonly baseUrl: string,
    process?: ChildProcess,
  ) {
    this.process = process;
  }

  async health(): Promise<ServiceHealth> {
    const response = await fetch(this.baseUrl + "/health");
    if (!response.ok) throw new Error(`health check failed (${response.status})`);
    return (await response.json()) as ServiceHealth;
  }

  /** Tokenize raw text with the flags the service's stats were built with. */
  async tokenize(text: string): Promise<string[]> {
    const payload = await postJson<{ words: string[] }>(this.baseUrl, "/tokenize", { text });
    return payload.words;
  }

  /** Per-word importance scores; identical values to the CLI `score`. */
  async score(words: string[]): Promise<number[]> {
    const payload = await postJson<{ ami: number[] }>(this.baseUrl, "/score", {
      id: "0",
      words,
    });
    return payload.ami;
  }

  /**
   * Word-level asymmetric mask pair. With equal (seed, id) the result is
   * identical to one line of the CLI `mask-pair` output.
   */
  async maskPairWords(
    input: { words?: string[]; text?: string },
    config: MaskPairConfig,
  ): Promise<WordMaskPair> {
    return postJson<WordMaskPair>(this.baseUrl, "/mask-pair", {
      id: config.id,
      words: input.words,
      text: input.text,
      seed: config.seed ?? 42,
      encoder_ratio: config.encoderRatio ?? 0.3,
      decoder_ratio: config.decoderRatio ?? 0.5,
      sigma: config.sigma ?? 1.0,
    });
  }

  /**
   * Token-level mask pair: the word-level pair broadcast through the
   * alignment (all subtokens of a masked word are masked; reserved
   * positions never are). Mask ratios are enforced at word level, so the
   * effective token-level ratio varies with word lengths.
   */
  async maskPair(
    words: string[],
    alignment: AlignmentMap,
    config: MaskPairConfig,
  ): Promise<TokenMaskPair> {
    const wordPair = await this.maskPairWords({ words }, config);
    return {
      encoderMask: expandMask(wordPair.encoder_mask, alignment),
      decoderMask: expandMask(wordPair.decoder_mask, alignment),
      wordPair,
    };
  }

  /** Stop the service if this handle spawned it. */
  close(): void {
    this.process?.kill();
  }
}

/** Connect to an already-running pmimask service. */
export async function connect(baseUrl: string): Promise<BridgeHandle> {
  const handle = new BridgeHandle(baseUrl.replace(/\/$/, ""));
  await handle.health();
  return handle;
}

export interface LoadStatsOptions {
  /** Port to serve on; default is a random high port. */
  port?: number;
  /** Python interpreter with the pmimask package installed. */
  python?: string;
  /** Seconds to wait for the service to come up. */
  timeoutSeconds?: number;
}

/**
 * Load a stats file by spawning a local pmimask service around it and
 * waiting until it is healthy. The stats are loaded once in the service
 * process; call `close()` on the handle to shut it down.
 */
export async function loadStats(
  statsPath: string,
  options: LoadStatsOptions = {},
): Promise<BridgeHandle> {
  const port = options.port ?? 20000 + Math.floor(Math.random() * 20000);
  const python = options.python ?? "python3";
  const child = spawn(
    python,
    ["-m", "pmimask.cli", "serve", "--stats", statsPath, "--host", "127.0.0.1", "--port", String(port)],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  let stderr = "";
  child.stderr?.on("data", (chunk) => {
    stderr += String(chunk);
  });

  const handle = new BridgeHandle(`http://127.0.0.1:${port}`, child);
  const deadline = Date.now() + (options.timeoutSeconds ?? 30) * 1000;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`pmimask service exited with code ${child.exitCode}: ${stderr}`);
    }
    try {
      await handle.health();
      return handle;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 100));
    }
  }
  child.kill();
  throw new Error(`pmimask service did not become healthy in time: ${stderr}`);
}
