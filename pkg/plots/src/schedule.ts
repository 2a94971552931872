/**
 * Per-step schedule figure: MSE scatter over denoising steps plus a least
 * squares trend fitted over the active steps only.
 *
 * Input schema: step,theta,entry_reuse_ratio,mse,psnr (the `schedule`
 * command of the benchmark CLI). Untouched steps carry an empty theta
 * field and are excluded from the fit.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv, requireColumns } from "./csv.js";
import { LineFit, leastSquares } from "./fit.js";
import { renderChart } from "./svg.js";

export function plotSchedule(csvPath: string, outPath: string): LineFit {
  const csv = parseCsv(readFileSync(csvPath, "utf8"));
  const cols = requireColumns(csv, ["step", "theta", "mse"]);
  const stepAt = cols.get("step")!;
  const thetaAt = cols.get("theta")!;
  const mseAt = cols.get("mse")!;

  const all: Array<[number, number]> = [];
  const activeX: number[] = [];
  const activeY: number[] = [];
  for (const row of csv.rows) {
    const step = Number(row[stepAt]);
    const err = Number(row[mseAt]);
    all.push([step, err]);
    if (row[thetaAt].trim() !== "") {
      activeX.push(step);
      activeY.push(err);
    }
  }
  if (activeX.length === 0) {
    throw new Error("no active steps to fit (every theta field is empty)");
  }
  const fit = leastSquares(activeX, activeY);

  const svg = renderChart(
    [
      {
        label: "per-step MSE",
        color: "#1f77b4",
        points: all.sort((a, b) => a[0] - b[0]),
        line: false,
      },
    ],
    {
      title: "Per-step MSE with fitted trend over active steps",
      xLabel: "denoising step",
      yLabel: "MSE vs dense",
      overlay: {
        slope: fit.slope,
        intercept: fit.intercept,
        xMin: Math.min(...activeX),
        xMax: Math.max(...activeX),
        color: "#d62728",
        label: "fitted trend",
      },
    },
  );
  writeFileSync(outPath, svg);
  return fit;
}
