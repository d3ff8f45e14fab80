import { describe, expect, it } from "vitest";

import { ApiError, SessionClient } from "../src/api.js";
import { GameController } from "../src/controller.js";
import { FakeServer } from "./fake-server.js";

describe("commit-reveal protocol ordering", () => {
  it("every reveal is preceded by an acknowledged commit for that round", async () => {
    const server = new FakeServer();
    const client = new SessionClient("", server.fetch);
    const controller = new GameController(client);

    await controller.start("pattern", 6);
    const moves: (1 | -1)[] = [1, 1, -1, 1, -1, -1];
    for (const move of moves) {
      expect(controller.acceptingInput).toBe(true);
      await controller.choose(move);
    }
    expect(controller.view.phase).toBe("over");
    expect(controller.view.history).toHaveLength(6);

    // walk the request log: commits and reveals must strictly alternate,
    // with the commit first in every round
    const calls = client.requestLog.filter((r) => r.method === "POST" && r.path.includes("/commit") || r.path.includes("/reveal"));
    let pendingCommit = false;
    let reveals = 0;
    for (const call of calls) {
      if (call.path.endsWith("/commit")) {
        expect(pendingCommit).toBe(false);
        pendingCommit = true;
      } else {
        expect(pendingCommit).toBe(true);
        pendingCommit = false;
        reveals += 1;
      }
    }
    expect(reveals).toBe(6);
  });

  it("ignores human input while no commit is acknowledged", async () => {
    const server = new FakeServer();
    const client = new SessionClient("", server.fetch);
    const controller = new GameController(client);
    // no session yet: choosing does nothing, no requests leave the client
    await controller.choose(1);
    expect(client.requestLog).toHaveLength(0);
  });

  it("retries a commit idempotently after a network failure", async () => {
    const server = new FakeServer();
    let failNext = 0;
    const flaky: typeof server.fetch = async (url, init) => {
      if (init?.method === "POST" && url.endsWith("/commit") && failNext > 0) {
        failNext -= 1;
        // the request reaches the server, but the response is lost
        await server.fetch(url, init);
        throw new TypeError("network error");
      }
      return server.fetch(url, init);
    };
    const client = new SessionClient("", flaky);
    const controller = new GameController(client);
    await controller.start("pattern", 4);

    failNext = 1;
    await controller.choose(1); // reveal round 1, then commit round 2 (flaky)
    expect(controller.view.phase).toBe("awaiting-choice");

    const commits = client.requestLog.filter((r) => r.path.endsWith("/commit"));
    const last = commits[commits.length - 1].body as { token: string };
    const prev = commits[commits.length - 2].body as { token: string };
    expect(last.token).toBe(prev.token); // same token on the retry

    await controller.choose(-1);
    await controller.choose(1);
    await controller.choose(1);
    expect(controller.view.phase).toBe("over");
    expect(controller.view.history).toHaveLength(4);
  });

  it("surfaces protocol errors without retrying them", async () => {
    const server = new FakeServer();
    const client = new SessionClient("", server.fetch);
    await client.createSession({ n: 2 });
    const id = server.sessions.keys().next().value as string;
    await client.commit(id);
    await expect(client.commit(id)).rejects.toThrowError(ApiError);
    const commits = client.requestLog.filter((r) => r.path.endsWith("/commit"));
    expect(commits).toHaveLength(2); // the 409 was not retried
  });
});
