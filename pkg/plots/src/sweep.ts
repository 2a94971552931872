/**
 * Threshold-sweep figure: MSE versus theta, one series per method, log y.
 *
 * Input schema: theta,method,entry_reuse_ratio,mse,psnr,qk_flops_actual
 * (the `sweep` command of the benchmark CLI).
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv, requireColumns } from "./csv.js";
import { renderChart, Series } from "./svg.js";

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function plotSweep(csvPath: string, outPath: string): void {
  const csv = parseCsv(readFileSync(csvPath, "utf8"));
  const cols = requireColumns(csv, ["theta", "method", "mse"]);
  const thetaAt = cols.get("theta")!;
  const methodAt = cols.get("method")!;
  const mseAt = cols.get("mse")!;

  const byMethod = new Map<string, Array<[number, number]>>();
  for (const row of csv.rows) {
    const method = row[methodAt];
    const point: [number, number] = [Number(row[thetaAt]), Number(row[mseAt])];
    if (!byMethod.has(method)) {
      byMethod.set(method, []);
    }
    byMethod.get(method)!.push(point);
  }

  const methods = [...byMethod.keys()].sort();
  const series: Series[] = methods.map((method, i) => ({
    label: method,
    color: PALETTE[i % PALETTE.length],
    points: byMethod.get(method)!.sort((a, b) => a[0] - b[0]),
  }));

  const svg = renderChart(series, {
    title: "Output MSE vs similarity threshold",
    xLabel: "theta",
    yLabel: "MSE vs dense",
    logY: true,
  });
  writeFileSync(outPath, svg);
}
