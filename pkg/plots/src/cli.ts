/**
 * Figure generation entry point.
 *
 * Usage:
 *   node dist/cli.js sweep <sweep.csv> <out.svg>
 *   node dist/cli.js schedule <schedule.csv> <out.svg>
 *
 * `schedule` prints the fitted slope and intercept as two floats on stdout.
 */

import { plotSchedule } from "./schedule.js";
import { plotSweep } from "./sweep.js";

export function main(argv: string[]): number {
  const [command, csvPath, outPath] = argv;
  if (!command || !csvPath || !outPath) {
    process.stderr.write("usage: cli.js {sweep|schedule} <input.csv> <output.svg>\n");
    return 2;
  }
  try {
    if (command === "sweep") {
      plotSweep(csvPath, outPath);
    } else if (command === "schedule") {
      const fit = plotSchedule(csvPath, outPath);
      process.stdout.write(`${fit.slope} ${fit.intercept}\n`);
    } else {
      process.stderr.write(`unknown command: ${command}\n`);
      return 2;
    }
  } catch (err) {
    process.stderr.write(`error: ${err instanceof Error ? err.message : String(err)}\n`);
    return 1;
  }
  return 0;
}

const isDirectRun = process.argv[1]?.endsWith("cli.js");
if (isDirectRun) {
  process.exit(main(process.argv.slice(2)));
}
