/** Session flow: start, commit, choose, reveal — one in-flight request.
 *
 * The controller guarantees protocol order: it always has an acknowledged
 * commit before it will accept a human choice, and it immediately re-commits
 * for the next round after each reveal.
 */

import { ApiError, SessionClient, type CreateSessionBody } from "./api.js";
import { reduce, initialView, type Action, type GameView } from "./state.js";

export interface Preset {
  label: string;
  body: (n: number, seed?: number) => CreateSessionBody;
}

export const PRESETS: Record<string, Preset> = {
  pattern: {
    label: "short patterns (period <= 4)",
    body: (n, seed) => ({ n, seed }),
  },
  imbalance: {
    label: "imbalance",
    body: (n, seed) => ({ phi: { kind: "imbalance", n }, seed }),
  },
};

export class GameController {
  view: GameView = initialView;
  private busy = false;

  constructor(
    private readonly client: SessionClient,
    private readonly onChange: (view: GameView) => void = () => {},
  ) {}

  private dispatch(action: Action): void {
    this.view = reduce(this.view, action);
    this.onChange(this.view);
  }

  get acceptingInput(): boolean {
    return !this.busy && this.view.phase === "awaiting-choice";
  }

  async start(preset: string, n: number, seed?: number): Promise<void> {
    if (this.busy) return;
    const make = PRESETS[preset];
    if (!make) throw new Error(`unknown preset ${preset}`);
    this.busy = true;
    try {
      const created = await this.client.createSession(make.body(n, seed));
      this.dispatch({ kind: "session-created", view: created });
      await this.commitNext();
    } catch (err) {
      this.dispatch({ kind: "failed", message: describe(err) });
    } finally {
      this.busy = false;
    }
  }

  private async commitNext(): Promise<void> {
    const id = this.view.sessionId;
    if (!id) return;
    this.dispatch({ kind: "commit-sent" });
    try {
      const ack = await this.client.commit(id);
      this.dispatch({ kind: "commit-acked", round: ack.round });
    } catch (err) {
      if (err instanceof ApiError && err.status === 410) {
        this.dispatch({ kind: "game-over", message: "Horizon reached — game over." });
      } else {
        this.dispatch({ kind: "failed", message: describe(err) });
      }
    }
  }

  /** The human picks a side; requires an acknowledged commit. */
  async choose(outcome: 1 | -1): Promise<void> {
    if (!this.acceptingInput) return;
    const id = this.view.sessionId;
    if (!id) return;
    this.busy = true;
    this.dispatch({ kind: "reveal-sent" });
    try {
      const result = await this.client.reveal(id, outcome);
      this.dispatch({ kind: "revealed", result });
      if (result.rounds_left > 0) await this.commitNext();
    } catch (err) {
      this.dispatch({ kind: "failed", message: describe(err) });
    } finally {
      this.busy = false;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  return err instanceof Error ? err.message : String(err);
}
