/** DOM wiring for the matching-pennies game. */

import { SessionClient } from "./api.js";
import { drawChart } from "./chart.js";
import { GameController, PRESETS } from "./controller.js";
import { renderHistory, renderScoreline, renderStatus, type GameView } from "./state.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
};

const statusEl = $("status");
const scoreEl = $("scoreline");
const historyEl = $<HTMLUListElement>("history");
const committedEl = $("committed-indicator");
const bannerEl = $("banner");
const leftBtn = $<HTMLButtonElement>("btn-left");
const rightBtn = $<HTMLButtonElement>("btn-right");
const startBtn = $<HTMLButtonElement>("btn-start");
const presetSel = $<HTMLSelectElement>("preset");
const roundsInput = $<HTMLInputElement>("rounds");
const chartEl = $<HTMLCanvasElement>("chart");

for (const [key, preset] of Object.entries(PRESETS)) {
  const opt = document.createElement("option");
  opt.value = key;
  opt.textContent = preset.label;
  presetSel.appendChild(opt);
}

function render(view: GameView): void {
  statusEl.textContent = renderStatus(view);
  scoreEl.textContent = renderScoreline(view);
  committedEl.classList.toggle("on", view.committed);
  committedEl.textContent = view.committed ? "machine has committed" : "…";
  bannerEl.textContent = view.banner ?? "";
  bannerEl.hidden = view.banner === null;
  const accepting = controller.acceptingInput;
  leftBtn.disabled = !accepting;
  rightBtn.disabled = !accepting;
  startBtn.disabled = view.phase === "committing" || view.phase === "revealing";
  historyEl.replaceChildren(
    ...renderHistory(view)
      .slice(-12)
      .reverse()
      .map((line) => {
        const li = document.createElement("li");
        li.textContent = line;
        return li;
      }),
  );
  drawChart(chartEl, view.history, view.horizon || 1);
}

const client = new SessionClient("");
const controller = new GameController(client, render);

startBtn.addEventListener("click", () => {
  const n = Math.max(1, Math.min(500, Number(roundsInput.value) || 50));
  void controller.start(presetSel.value, n);
});
leftBtn.addEventListener("click", () => void controller.choose(-1));
rightBtn.addEventListener("click", () => void controller.choose(1));
document.addEventListener("keydown", (ev) => {
  if (ev.key === "ArrowLeft" || ev.key.toLowerCase() === "l") void controller.choose(-1);
  if (ev.key === "ArrowRight" || ev.key.toLowerCase() === "r") void controller.choose(1);
});

render(controller.view);
