/** Wire types for the line-delimited JSON session protocol. */

export const AGENT_IDS = ["agent_ls", "agent_dc", "agent_bat"] as const;

export type AgentId = (typeof AGENT_IDS)[number];

export type AgentActions = Record<AgentId, number>;

export type AgentObservations = Record<AgentId, number[]>;

export type AgentRewards = Record<AgentId, number>;

/** Per-step record fields mirrored from the core simulator. */
export interface StepInfo {
  t: number;
  b_t: number;
  b_hat: number;
  e_it: number;
  e_hvac: number;
  e_bat: number;
  ci: number;
  cfp_kg: number;
  water_liters: number;
  queue: number;
  dropped: number;
  r_ls: number;
  r_dc: number;
  r_bat: number;
  mixed_r_ls: number;
  mixed_r_dc: number;
  mixed_r_bat: number;
  setpoint: number;
  soc: number;
}

export interface ResetRequest {
  op: "reset";
  config?: string;
  scenario?: Record<string, unknown>;
  seed?: number;
  start_step?: number;
  horizon?: number;
}

export interface StepRequest {
  op: "step";
  actions: AgentActions;
}

export interface CloseRequest {
  op: "close";
}

export type Request = ResetRequest | StepRequest | CloseRequest;

export interface ErrorBody {
  type: "usage" | "contract" | "validation" | "protocol" | "runtime";
  message: string;
}

export interface ResetResponse {
  ok: true;
  obs: AgentObservations;
  layout_version: string;
  horizon: number;
  seed: number;
}

export interface StepResponse {
  ok: true;
  obs: AgentObservations;
  rewards: AgentRewards;
  done: boolean;
  info: StepInfo;
}

export interface CloseResponse {
  ok: true;
  closed: true;
}

export interface ErrorResponse {
  ok: false;
  error: ErrorBody;
}

export type Response = ResetResponse | StepResponse | CloseResponse | ErrorResponse;
