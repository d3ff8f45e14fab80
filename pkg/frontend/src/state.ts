/** Pure game-view state: a reducer over API responses plus text renderers.
 *
 * All view state is derived from API responses — the client never predicts
 * anything itself.  Renderers are pure functions of the view so rendering is
 * deterministic given a fixed transcript (snapshot-testable).
 */

import type { RevealResult, SessionView } from "./api.js";

export type Phase = "idle" | "committing" | "awaiting-choice" | "revealing" | "over" | "error";

export interface PlayedRound {
  round: number;
  prediction: number;
  outcome: number;
  machineCorrect: boolean;
}

export interface GameView {
  sessionId: string | null;
  horizon: number;
  round: number;
  roundsLeft: number;
  phase: Phase;
  committed: boolean;
  history: PlayedRound[];
  machineScore: number;
  machineWinRate: number;
  banner: string | null;
}

export const initialView: GameView = {
  sessionId: null,
  horizon: 0,
  round: 0,
  roundsLeft: 0,
  phase: "idle",
  committed: false,
  history: [],
  machineScore: 0,
  machineWinRate: 0,
  banner: null,
};

export type Action =
  | { kind: "session-created"; view: SessionView }
  | { kind: "commit-sent" }
  | { kind: "commit-acked"; round: number }
  | { kind: "reveal-sent" }
  | { kind: "revealed"; result: RevealResult }
  | { kind: "game-over"; message: string }
  | { kind: "failed"; message: string };

export function reduce(view: GameView, action: Action): GameView {
  switch (action.kind) {
    case "session-created":
      return {
        ...initialView,
        sessionId: action.view.id,
        horizon: action.view.n,
        round: action.view.round,
        roundsLeft: action.view.rounds_left,
        phase: "committing",
      };
    case "commit-sent":
      return { ...view, phase: "committing", committed: false };
    case "commit-acked":
      return { ...view, phase: "awaiting-choice", committed: true, round: action.round };
    case "reveal-sent":
      return { ...view, phase: "revealing" };
    case "revealed": {
      const r = action.result;
      const played: PlayedRound = {
        round: r.round,
        prediction: r.prediction,
        outcome: r.outcome,
        machineCorrect: r.machine_correct,
      };
      const history = [...view.history, played];
      const over = r.rounds_left === 0;
      return {
        ...view,
        phase: over ? "over" : "committing",
        committed: false,
        round: r.round,
        roundsLeft: r.rounds_left,
        history,
        machineScore: history.filter((h) => h.machineCorrect).length,
        machineWinRate: r.machine_win_rate,
        banner: over ? "Game over" : null,
      };
    }
    case "game-over":
      return { ...view, phase: "over", committed: false, banner: action.message };
    case "failed":
      return { ...view, phase: "error", banner: action.message };
  }
}

// ---------------------------------------------------------------- renderers

const sideName = (v: number): string => (v === 1 ? "R" : "L");

export function renderStatus(view: GameView): string {
  if (view.phase === "idle") return "Pick a preset and start a game.";
  if (view.phase === "over") return view.banner ?? "Game over";
  if (view.phase === "error") return `Error: ${view.banner ?? "unknown"}`;
  const head = `Round ${view.round}/${view.horizon}`;
  if (view.phase === "awaiting-choice") {
    return `${head} — machine has committed. Your move: Left or Right?`;
  }
  return `${head} — waiting for the machine…`;
}

export function renderScoreline(view: GameView): string {
  const played = view.history.length;
  const human = played - view.machineScore;
  const rate = played ? `${Math.round(view.machineWinRate * 100)}%` : "–";
  return `machine ${view.machineScore} : ${human} you  (machine win rate ${rate})`;
}

export function renderHistory(view: GameView): string[] {
  return view.history.map(
    (h) =>
      `#${h.round}  you ${sideName(h.outcome)}  machine guessed ${sideName(h.prediction)}  ` +
      (h.machineCorrect ? "machine wins" : "you win"),
  );
}
