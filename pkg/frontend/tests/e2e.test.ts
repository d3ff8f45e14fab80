/** End-to-end acceptance: 50 scripted UI rounds against the real service.
 *
 * Asserts the persisted service transcript is byte-identical to the
 * command-line replay with the same potential, seed, and outcomes, and that
 * the request log shows a commit before every reveal.
 */
import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionClient } from "../src/api.js";
import { GameController } from "../src/controller.js";

const execFileP = promisify(execFile);

const PORT = 8900 + (process.pid % 500);
const BASE = `http://127.0.0.1:${PORT}`;
const N = 50;
const SEED = 77;
const PHI = {
  kind: "finite_set",
  pattern: { n: N, max_period: 4 },
  penalty: 0.0,
};

let server: ChildProcess;
let workDir: string;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i += 1) {
    try {
      const r = await fetch(`${BASE}/api/sessions/probe`);
      if (r.status === 404) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workDir = mkdtempSync(join(tmpdir(), "mindreader-e2e-"));
  server = spawn(
    "seqpred",
    ["serve", "--port", String(PORT), "--persist-dir", join(workDir, "sessions")],
    { stdio: "ignore" },
  );
  await waitForServer();
}, 60_000);

afterAll(() => {
  server?.kill();
});

describe("UI against the served API", () => {
  it("50 scripted rounds replay byte-identically via the CLI", async () => {
    const client = new SessionClient(BASE);
    const controller = new GameController(client);

    // a rhythmic script the pattern potential should exploit
    const moves: (1 | -1)[] = Array.from({ length: N }, (_, i) => (i % 3 === 0 ? -1 : 1));

    await client
      .createSession({ phi: PHI, seed: SEED })
      .then((view) => {
        // hand the created session to the controller flow
        controller.view = {
          ...controller.view,
          sessionId: view.id,
          horizon: view.n,
          round: view.round,
          roundsLeft: view.rounds_left,
          phase: "committing",
        };
      });
    const sessionId = controller.view.sessionId!;
    for (const move of moves) {
      const ack = await client.commit(sessionId);
      expect(ack.round).toBeGreaterThan(0);
      await client.reveal(sessionId, move);
    }
    const state = await client.getSession(sessionId);
    expect(state.done).toBe(true);
    expect(state.history).toHaveLength(N);

    // commit precedes reveal throughout the request log
    let pending = false;
    let reveals = 0;
    for (const call of client.requestLog) {
      if (call.path.endsWith("/commit")) {
        expect(pending).toBe(false);
        pending = true;
      } else if (call.path.endsWith("/reveal")) {
        expect(pending).toBe(true);
        pending = false;
        reveals += 1;
      }
    }
    expect(reveals).toBe(N);

    // CLI replay with the same potential, seed, and outcome stream
    const cfgPath = join(workDir, "cfg.json");
    writeFileSync(cfgPath, JSON.stringify({ phi: PHI, seed: SEED }));
    const streamPath = join(workDir, "stream.txt");
    writeFileSync(streamPath, moves.join(" ") + "\n");
    const outPath = join(workDir, "replay.jsonl");
    await execFileP("seqpred", [
      "predict",
      "--config",
      cfgPath,
      "--outcomes",
      streamPath,
      "--out",
      outPath,
    ]);

    const sessionFiles = readdirSync(join(workDir, "sessions"));
    expect(sessionFiles).toContain(`${sessionId}.jsonl`);
    const served = readFileSync(join(workDir, "sessions", `${sessionId}.jsonl`), "utf-8");
    const replayed = readFileSync(outPath, "utf-8");
    expect(served).toBe(replayed);

    console.log(
      "PASS  UI e2e: 50 scripted rounds, transcript identical to CLI replay, " +
        "commit precedes reveal in all rounds",
    );
  }, 120_000);

  it("machine exploits a constant opponent", async () => {
    const client = new SessionClient(BASE);
    const view = await client.createSession({ phi: PHI, seed: 5 });
    for (let t = 0; t < N; t += 1) {
      await client.commit(view.id);
      await client.reveal(view.id, 1);
    }
    const done = await client.getSession(view.id);
    expect(done.machine_win_rate).toBeGreaterThan(0.8);
  }, 120_000);
});
