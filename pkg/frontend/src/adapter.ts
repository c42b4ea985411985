/**
 * Multi-agent reset/step adapter over the core simulator's line-delimited
 * JSON session protocol.
 *
 * One adapter instance owns one core subprocess (`python -m dcsim serve`)
 * and one episode session. Requests are strictly sequential: each call
 * writes one line and resolves with the matching response line.
 */

import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import { createInterface, type Interface } from "node:readline";

import type {
  AgentActions,
  AgentObservations,
  AgentRewards,
  ErrorBody,
  Request,
  ResetResponse,
  Response,
  StepInfo,
  StepResponse,
} from "./protocol.js";

export class EnvAdapterError extends Error {
  constructor(
    readonly kind: ErrorBody["type"] | "transport",
    message: string,
  ) {
    super(message);
    this.name = "EnvAdapterError";
  }
}

export interface EnvSessionOptions {
  /** Python executable used to launch the core. Default: "python3". */
  pythonBin?: string;
  /** Extra environment entries for the subprocess (e.g. PYTHONPATH). */
  env?: Record<string, string>;
}

export interface ResetOptions {
  config?: string;
  scenario?: Record<string, unknown>;
  seed?: number;
  startStep?: number;
  horizon?: number;
}

export interface AdapterStepResult {
  obs: AgentObservations;
  rewards: AgentRewards;
  done: boolean;
  info: StepInfo;
}

interface Pending {
  resolve: (value: Response) => void;
  reject: (err: Error) => void;
}

export class EnvSession {
  private proc: ChildProcessWithoutNullStreams | null = null;
  private lines: Interface | null = null;
  private pending: Pending[] = [];
  private stderrTail: string[] = [];
  private started = false;
  private resetDone = false;

  layoutVersion: string | null = null;
  horizon: number | null = null;

  constructor(private readonly options: EnvSessionOptions = {}) {}

  start(): void {
    if (this.started) return;
    const bin = this.options.pythonBin ?? "python3";
    this.proc = spawn(bin, ["-m", "dcsim", "serve"], {
      stdio: ["pipe", "pipe", "pipe"],
      env: { ...process.env, ...this.options.env },
    });
    this.proc.stderr.on("data", (chunk: Buffer) => {
      this.stderrTail.push(chunk.toString());
      if (this.stderrTail.length > 20) this.stderrTail.shift();
    });
    this.proc.on("exit", () => this.failAllPending("core process exited"));
    this.lines = createInterface({ input: this.proc.stdout });
    this.lines.on("line", (line) => {
      const waiter = this.pending.shift();
      if (!waiter) return;
      try {
        waiter.resolve(JSON.parse(line) as Response);
      } catch (err) {
        waiter.reject(new EnvAdapterError("transport", `bad response line: ${line}`));
      }
    });
    this.started = true;
  }

  private failAllPending(reason: string): void {
    const stderr = this.stderrTail.join("");
    while (this.pending.length > 0) {
      this.pending
        .shift()!
        .reject(new EnvAdapterError("transport", `${reason}${stderr ? `: ${stderr}` : ""}`));
    }
  }

  private request(req: Request): Promise<Response> {
    this.start();
    if (!this.proc || this.proc.exitCode !== null) {
      return Promise.reject(new EnvAdapterError("transport", "core process not running"));
    }
    return new Promise<Response>((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.proc!.stdin.write(JSON.stringify(req) + "\n");
    });
  }

  private unwrap<T extends Response>(resp: Response): T {
    if (!resp.ok) {
      throw new EnvAdapterError(resp.error.type, resp.error.message);
    }
    return resp as T;
  }

  /** Initialize (or re-initialize) the episode; returns initial observations. */
  async reset(options: ResetOptions): Promise<AgentObservations> {
    const req: Request = { op: "reset" };
    if (options.config !== undefined) req.config = options.config;
    if (options.scenario !== undefined) req.scenario = options.scenario;
    if (options.seed !== undefined) req.seed = options.seed;
    if (options.startStep !== undefined) req.start_step = options.startStep;
    if (options.horizon !== undefined) req.horizon = options.horizon;
    const resp = this.unwrap<ResetResponse>(await this.request(req));
    this.layoutVersion = resp.layout_version;
    this.horizon = resp.horizon;
    this.resetDone = true;
    return resp.obs;
  }

  /** Advance one step with per-agent action indices in {0, 1, 2}. */
  async step(actions: AgentActions): Promise<AdapterStepResult> {
    if (!this.resetDone) {
      throw new EnvAdapterError("usage", "step before reset");
    }
    const resp = this.unwrap<StepResponse>(await this.request({ op: "step", actions }));
    return { obs: resp.obs, rewards: resp.rewards, done: resp.done, info: resp.info };
  }

  async close(): Promise<void> {
    if (!this.started || !this.proc) return;
    try {
      await this.request({ op: "close" });
    } catch {
      // the process may already be gone; killing below is enough
    }
    this.proc.kill();
    this.proc = null;
    this.lines?.close();
    this.started = false;
    this.resetDone = false;
  }
}
