/** Cumulative score chart: pure series computation plus a canvas painter. */

import type { PlayedRound } from "./state.js";

export interface ChartPoint {
  round: number;
  machineLead: number; // machine wins minus human wins after this round
}

export function chartSeries(history: PlayedRound[]): ChartPoint[] {
  let lead = 0;
  return history.map((h) => {
    lead += h.machineCorrect ? 1 : -1;
    return { round: h.round, machineLead: lead };
  });
}

export function drawChart(
  canvas: HTMLCanvasElement,
  history: PlayedRound[],
  horizon: number,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);

  const series = chartSeries(history);
  const span = Math.max(horizon, 1);
  const maxLead = Math.max(4, ...series.map((p) => Math.abs(p.machineLead)));
  const x = (round: number) => (round / span) * (w - 20) + 10;
  const y = (lead: number) => h / 2 - (lead / maxLead) * (h / 2 - 10);

  ctx.strokeStyle = "#666";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(10, h / 2);
  ctx.lineTo(w - 10, h / 2);
  ctx.stroke();

  if (!series.length) return;
  ctx.strokeStyle = "#c0392b";
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(x(0), y(0));
  for (const p of series) ctx.lineTo(x(p.round), y(p.machineLead));
  ctx.stroke();

  const last = series[series.length - 1];
  ctx.fillStyle = "#c0392b";
  ctx.beginPath();
  ctx.arc(x(last.round), y(last.machineLead), 3, 0, 2 * Math.PI);
  ctx.fill();
}
