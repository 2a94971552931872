import { mkdtempSync, readFileSync, writeFileSync, statSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";

import { afterEach, describe, expect, it, vi } from "vitest";

import { parseCsv, requireColumns } from "../src/csv.js";
import { leastSquares } from "../src/fit.js";
import { plotSchedule } from "../src/schedule.js";
import { plotSweep } from "../src/sweep.js";
import { main } from "../src/cli.js";

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

const outDir = () => mkdtempSync(join(tmpdir(), "plots-"));

describe("csv", () => {
  it("parses the golden sweep schema", () => {
    const csv = parseCsv(readFileSync(fixture("sweep.csv"), "utf8"));
    expect(csv.header).toEqual([
      "theta", "method", "entry_reuse_ratio", "mse", "psnr", "qk_flops_actual",
    ]);
    expect(csv.rows.length).toBe(15); // 5 thetas x 3 methods
  });

  it("names the missing column", () => {
    const csv = parseCsv(readFileSync(fixture("missing_mse.csv"), "utf8"));
    expect(() => requireColumns(csv, ["theta", "method", "mse"])).toThrow(
      /missing column: mse/,
    );
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2,3\n")).toThrow(/expected 2/);
  });
});

describe("leastSquares", () => {
  it("recovers an exact line", () => {
    const xs = [0, 1, 2, 3, 4];
    const ys = xs.map((x) => 2 * x + 1);
    const fit = leastSquares(xs, ys);
    expect(fit.slope).toBeCloseTo(2, 12);
    expect(fit.intercept).toBeCloseTo(1, 12);
  });

  it("fits constant data with zero slope", () => {
    const fit = leastSquares([1, 2, 3], [5, 5, 5]);
    expect(Math.abs(fit.slope)).toBeLessThan(1e-12);
    expect(fit.intercept).toBeCloseTo(5, 12);
  });
});

describe("plotSweep", () => {
  it("writes a non-empty SVG with one series per method", () => {
    const out = join(outDir(), "sweep.svg");
    plotSweep(fixture("sweep.csv"), out);
    const svg = readFileSync(out, "utf8");
    expect(statSync(out).size).toBeGreaterThan(0);
    expect(svg).toContain("<svg");
    for (const method of ["reuse", "mask-skip", "mask-mag"]) {
      expect(svg).toContain(`>${method}</text>`);
    }
  });

  it("handles a single-method CSV", () => {
    const text = readFileSync(fixture("sweep.csv"), "utf8");
    const lines = text.trim().split("\n");
    const single = [lines[0], ...lines.slice(1).filter((l) => l.includes(",reuse,"))];
    const dir = outDir();
    const csvPath = join(dir, "single.csv");
    writeFileSync(csvPath, single.join("\n") + "\n");
    const out = join(dir, "single.svg");
    plotSweep(csvPath, out);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain(">reuse</text>");
    expect(svg).not.toContain(">mask-skip</text>");
  });

  it("reports the missing mse column by name", () => {
    const out = join(outDir(), "bad.svg");
    expect(() => plotSweep(fixture("missing_mse.csv"), out)).toThrow(
      /missing column: mse/,
    );
  });
});

describe("plotSchedule", () => {
  it("writes the figure and leaves the input untouched", () => {
    const before = readFileSync(fixture("schedule.csv"));
    const out = join(outDir(), "schedule.svg");
    const fit = plotSchedule(fixture("schedule.csv"), out);
    expect(statSync(out).size).toBeGreaterThan(0);
    expect(Number.isFinite(fit.slope)).toBe(true);
    expect(readFileSync(fixture("schedule.csv"))).toEqual(before);
  });

  it("fits slope 0 on the constant-MSE fixture", () => {
    const out = join(outDir(), "constant.svg");
    const fit = plotSchedule(fixture("constant_schedule.csv"), out);
    expect(Math.abs(fit.slope)).toBeLessThanOrEqual(1e-9);
    expect(fit.intercept).toBeCloseTo(0.025, 9);
  });

  it("excludes untouched steps from the fit", () => {
    // blow up the untouched rows; the fit must not move
    const text = readFileSync(fixture("constant_schedule.csv"), "utf8");
    const poisoned = text
      .split("\n")
      .map((line) => {
        const cells = line.split(",");
        if (cells.length > 3 && cells[1] === "") {
          cells[3] = "999.0";
        }
        return cells.join(",");
      })
      .join("\n");
    const dir = outDir();
    const csvPath = join(dir, "poisoned.csv");
    writeFileSync(csvPath, poisoned);
    const fit = plotSchedule(csvPath, join(dir, "poisoned.svg"));
    expect(Math.abs(fit.slope)).toBeLessThanOrEqual(1e-9);
  });

  it("is deterministic for a fixed input", () => {
    const dir = outDir();
    const a = join(dir, "a.svg");
    const b = join(dir, "b.svg");
    const fitA = plotSchedule(fixture("schedule.csv"), a);
    const fitB = plotSchedule(fixture("schedule.csv"), b);
    expect(fitA).toEqual(fitB);
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it("rejects an all-untouched schedule", () => {
    const dir = outDir();
    const csvPath = join(dir, "idle.csv");
    writeFileSync(csvPath, "step,theta,entry_reuse_ratio,mse,psnr\n0,,0.0,0.0,inf\n");
    expect(() => plotSchedule(csvPath, join(dir, "idle.svg"))).toThrow(/active/);
  });
});

describe("cli", () => {
  afterEach(() => vi.restoreAllMocks());

  it("runs both commands and prints the schedule fit", () => {
    const dir = outDir();
    const lines: string[] = [];
    vi.spyOn(process.stdout, "write").mockImplementation((chunk) => {
      lines.push(String(chunk));
      return true;
    });
    expect(main(["sweep", fixture("sweep.csv"), join(dir, "s.svg")])).toBe(0);
    expect(main(["schedule", fixture("constant_schedule.csv"), join(dir, "c.svg")])).toBe(0);
    const printed = lines.join("").trim().split(/\s+/).map(Number);
    expect(printed).toHaveLength(2);
    expect(Math.abs(printed[0])).toBeLessThanOrEqual(1e-9);
    expect(printed[1]).toBeCloseTo(0.025, 9);
  });

  it("exits non-zero naming the missing column", () => {
    const errs: string[] = [];
    vi.spyOn(process.stderr, "write").mockImplementation((chunk) => {
      errs.push(String(chunk));
      return true;
    });
    const code = main(["sweep", fixture("missing_mse.csv"), join(outDir(), "x.svg")]);
    expect(code).toBe(1);
    expect(errs.join("")).toContain("missing column: mse");
  });

  it("rejects bad usage", () => {
    vi.spyOn(process.stderr, "write").mockImplementation(() => true);
    expect(main([])).toBe(2);
    expect(main(["nope", "a", "b"])).toBe(2);
  });
});
