import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { EnvAdapterError, EnvSession } from "../src/adapter.js";
import { ScriptedActionStream } from "../src/lcg.js";
import type { AgentActions, AgentObservations, StepInfo } from "../src/protocol.js";

const ROOT = fileURLToPath(new URL("../..", import.meta.url));
const FIXTURES = join(ROOT, "fixtures");
const PYTHON = process.env.DCSIM_PYTHON ?? "python3";
const PY_ENV = {
  PYTHONPATH: join(ROOT, "src") + (process.env.PYTHONPATH ? `:${process.env.PYTHONPATH}` : ""),
};

const HORIZON = 100;
const SCENARIOS = ["ny_7day.json", "summer_7day.json", "flex_7day.json"];
const SEEDS = [1, 2, 3];

interface GoldenLine {
  t: number;
  obs: AgentObservations;
  actions: AgentActions;
  rewards: Record<string, number>;
  done: boolean;
  info: StepInfo;
}

function scriptedSeeds(seed: number): [number, number, number] {
  return [100 * seed + 1, 100 * seed + 2, 100 * seed + 3];
}

function generateGolden(workDir: string, scenario: string, seed: number): GoldenLine[] {
  const config = join(FIXTURES, scenario);
  const [ls, dc, bat] = scriptedSeeds(seed);
  const jsonl = join(workDir, `golden_${scenario}_${seed}.jsonl`);
  execFileSync(
    PYTHON,
    [
      "-m", "dcsim", "run",
      "--config", config,
      "--controllers", `ls=scripted:${ls},dc=scripted:${dc},bat=scripted:${bat}`,
      "--horizon", String(HORIZON),
      "--jsonl", jsonl,
      "--out", join(workDir, `out_${scenario}_${seed}`),
    ],
    { env: { ...process.env, ...PY_ENV }, stdio: ["ignore", "ignore", "pipe"] },
  );
  return readFileSync(jsonl, "utf8")
    .trim()
    .split("\n")
    .map((line) => JSON.parse(line) as GoldenLine);
}

function makeSession(): EnvSession {
  return new EnvSession({ pythonBin: PYTHON, env: PY_ENV });
}

describe("adapter equivalence against primary golden traces", () => {
  let workDir: string;
  const goldens = new Map<string, GoldenLine[]>();

  beforeAll(() => {
    workDir = mkdtempSync(join(tmpdir(), "dcsim-golden-"));
    for (const scenario of SCENARIOS) {
      for (const seed of SEEDS) {
        goldens.set(`${scenario}:${seed}`, generateGolden(workDir, scenario, seed));
      }
    }
  }, 180_000);

  afterAll(() => {
    rmSync(workDir, { recursive: true, force: true });
  });

  for (const scenario of SCENARIOS) {
    for (const seed of SEEDS) {
      it(
        `replays ${scenario} seed ${seed} bit-exactly over ${HORIZON} steps`,
        async () => {
          const golden = goldens.get(`${scenario}:${seed}`)!;
          expect(golden).toHaveLength(HORIZON);

          const session = makeSession();
          try {
            const [ls, dc, bat] = scriptedSeeds(seed);
            const streams = {
              agent_ls: new ScriptedActionStream(ls),
              agent_dc: new ScriptedActionStream(dc),
              agent_bat: new ScriptedActionStream(bat),
            };
            const obs0 = await session.reset({
              config: join(FIXTURES, scenario),
              horizon: HORIZON,
              seed,
            });
            expect(session.layoutVersion).toBe("1");
            expect(obs0).toEqual(golden[0].obs);

            for (let i = 0; i < HORIZON; i++) {
              const actions: AgentActions = {
                agent_ls: streams.agent_ls.next(),
                agent_dc: streams.agent_dc.next(),
                agent_bat: streams.agent_bat.next(),
              };
              expect(actions).toEqual(golden[i].actions);
              const result = await session.step(actions);
              expect(result.info).toEqual(golden[i].info);
              expect(result.rewards).toEqual(golden[i].rewards);
              expect(result.done).toBe(golden[i].done);
              if (i + 1 < HORIZON) {
                expect(result.obs).toEqual(golden[i + 1].obs);
              }
            }
          } finally {
            await session.close();
          }
        },
        60_000,
      );
    }
  }
});

describe("adapter contract", () => {
  it("observation vector lengths follow the documented layout", async () => {
    const session = makeSession();
    try {
      // ny scenario: forecast window length 16
      const obs = await session.reset({ config: join(FIXTURES, "ny_7day.json"), horizon: 4 });
      expect(obs.agent_ls).toHaveLength(7 + 17);
      expect(obs.agent_dc).toHaveLength(8 + 17);
      expect(obs.agent_bat).toHaveLength(6 + 17);
      // flex scenario: forecast window length 12
      const obs2 = await session.reset({ config: join(FIXTURES, "flex_7day.json"), horizon: 4 });
      expect(obs2.agent_ls).toHaveLength(7 + 13);
    } finally {
      await session.close();
    }
  }, 30_000);

  it("reset twice with the same seed yields identical observations", async () => {
    const session = makeSession();
    try {
      const config = join(FIXTURES, "ny_7day.json");
      const a = await session.reset({ config, seed: 7, horizon: 4 });
      const b = await session.reset({ config, seed: 7, horizon: 4 });
      expect(b).toEqual(a);
    } finally {
      await session.close();
    }
  }, 30_000);

  it("rejects an out-of-range action naming the agent", async () => {
    const session = makeSession();
    try {
      await session.reset({ config: join(FIXTURES, "ny_7day.json"), horizon: 4 });
      await expect(
        session.step({ agent_ls: 5, agent_dc: 1, agent_bat: 1 }),
      ).rejects.toThrowError(/agent_ls/);
      try {
        await session.step({ agent_ls: 5, agent_dc: 1, agent_bat: 1 });
      } catch (err) {
        expect((err as EnvAdapterError).kind).toBe("contract");
      }
      // session stays usable
      const result = await session.step({ agent_ls: 1, agent_dc: 1, agent_bat: 1 });
      expect(result.done).toBe(false);
    } finally {
      await session.close();
    }
  }, 30_000);

  it("flags done at the horizon and refuses further steps", async () => {
    const session = makeSession();
    try {
      await session.reset({ config: join(FIXTURES, "ny_7day.json"), horizon: 2 });
      const idle: AgentActions = { agent_ls: 1, agent_dc: 1, agent_bat: 1 };
      expect((await session.step(idle)).done).toBe(false);
      expect((await session.step(idle)).done).toBe(true);
      await expect(session.step(idle)).rejects.toSatisfy(
        (err: unknown) => (err as EnvAdapterError).kind === "usage",
      );
    } finally {
      await session.close();
    }
  }, 30_000);

  it("propagates validation errors and creates no session", async () => {
    const session = makeSession();
    try {
      await expect(
        session.reset({ scenario: { experiment: { flexible_ratio: 2.0 } } }),
      ).rejects.toSatisfy((err: unknown) => (err as EnvAdapterError).kind === "validation");
      await expect(
        session.step({ agent_ls: 1, agent_dc: 1, agent_bat: 1 }),
      ).rejects.toSatisfy((err: unknown) => (err as EnvAdapterError).kind === "usage");
    } finally {
      await session.close();
    }
  }, 30_000);

  it("step before reset is a usage error without touching the core", async () => {
    const session = makeSession();
    try {
      await expect(
        session.step({ agent_ls: 1, agent_dc: 1, agent_bat: 1 }),
      ).rejects.toSatisfy((err: unknown) => (err as EnvAdapterError).kind === "usage");
    } finally {
      await session.close();
    }
  }, 30_000);
});

describe("scripted action stream", () => {
  it("matches the core generator constants and resets exactly", () => {
    const stream = new ScriptedActionStream(123);
    const first = Array.from({ length: 12 }, () => stream.next());
    stream.reset();
    const second = Array.from({ length: 12 }, () => stream.next());
    expect(second).toEqual(first);
    expect(new Set(first).size).toBeGreaterThan(1);
    for (const v of first) expect([0, 1, 2]).toContain(v);
  });
});
