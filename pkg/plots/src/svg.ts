/**
 * Hand-rolled SVG line/scatter charts, no rendering dependencies.
 *
 * Good enough for benchmark figures: one plot area, linear or log10 y axis,
 * polyline and/or marker series, optional straight overlay line, legend.
 */

export interface Series {
  label: string;
  color: string;
  points: Array<[number, number]>;
  line?: boolean;
  markers?: boolean;
}

export interface OverlayLine {
  slope: number;
  intercept: number;
  xMin: number;
  xMax: number;
  color: string;
  label?: string;
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logY?: boolean;
  width?: number;
  height?: number;
  overlay?: OverlayLine;
}

const MARGIN = { top: 44, right: 24, bottom: 52, left: 72 };

function niceTicks(min: number, max: number, count = 5): number[] {
  if (min === max) {
    return [min];
  }
  const span = max - min;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(min / chosen) * chosen; v <= max + 1e-12 * span; v += chosen) {
    ticks.push(v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(1);
  return String(Math.round(v * 1e6) / 1e6);
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderChart(series: Series[], opts: ChartOptions): string {
  const width = opts.width ?? 800;
  const height = opts.height ?? 500;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = series.flatMap((s) => s.points.map((p) => p[0]));
  let ys = series.flatMap((s) => s.points.map((p) => p[1]));
  if (opts.overlay) {
    xs.push(opts.overlay.xMin, opts.overlay.xMax);
  }
  if (xs.length === 0) {
    throw new Error("nothing to plot");
  }

  // log scale cannot show zeros; floor them just below the smallest positive
  let logY = Boolean(opts.logY);
  let yFloor = 0;
  if (logY) {
    const positive = ys.filter((y) => y > 0);
    if (positive.length === 0) {
      logY = false;
    } else {
      yFloor = Math.min(...positive) / 10;
      ys = ys.map((y) => (y > 0 ? y : yFloor));
    }
  }

  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const ty = (v: number) => (logY ? Math.log10(Math.max(v, yFloor)) : v);
  const yMinRaw = Math.min(...ys.map(ty));
  const yMaxRaw = Math.max(...ys.map(ty));
  const yPad = yMinRaw === yMaxRaw ? Math.max(1e-9, Math.abs(yMinRaw) * 0.1) : 0;
  const yMin = yMinRaw - yPad;
  const yMax = yMaxRaw + yPad;

  const px = (x: number) =>
    MARGIN.left + (xMax === xMin ? plotW / 2 : ((x - xMin) / (xMax - xMin)) * plotW);
  const py = (y: number) =>
    MARGIN.top + plotH - ((ty(y) - yMin) / (yMax - yMin)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="24" text-anchor="middle" font-size="16">${escapeXml(opts.title)}</text>`,
  );

  // axes
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  parts.push(
    `<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}" stroke="black"/>`,
    `<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}" stroke="black"/>`,
  );
  for (const t of niceTicks(xMin, xMax)) {
    const x = px(t);
    parts.push(
      `<line x1="${x}" y1="${y0}" x2="${x}" y2="${y0 + 5}" stroke="black"/>`,
      `<text x="${x}" y="${y0 + 20}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
    );
  }
  const yTicks = logY
    ? rangeInt(Math.ceil(yMin), Math.floor(yMax)).map((e) => Math.pow(10, e))
    : niceTicks(yMin, yMax);
  for (const t of yTicks) {
    const y = py(t);
    parts.push(
      `<line x1="${x0 - 5}" y1="${y}" x2="${x0}" y2="${y}" stroke="black"/>`,
      `<line x1="${x0}" y1="${y}" x2="${x0 + plotW}" y2="${y}" stroke="#dddddd"/>`,
      `<text x="${x0 - 8}" y="${y + 4}" text-anchor="end" font-size="11">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${height - 14}" text-anchor="middle" font-size="13">${escapeXml(opts.xLabel)}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${escapeXml(opts.yLabel)}${logY ? " (log)" : ""}</text>`,
  );

  for (const s of series) {
    const pts = s.points.map(([x, y]) => [px(x), py(y)] as const);
    if (s.line !== false && pts.length > 1) {
      const path = pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
      parts.push(`<polyline points="${path}" fill="none" stroke="${s.color}" stroke-width="2"/>`);
    }
    if (s.markers !== false) {
      for (const [x, y] of pts) {
        parts.push(`<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3" fill="${s.color}"/>`);
      }
    }
  }

  if (opts.overlay) {
    const o = opts.overlay;
    const ya = o.intercept + o.slope * o.xMin;
    const yb = o.intercept + o.slope * o.xMax;
    parts.push(
      `<line x1="${px(o.xMin).toFixed(2)}" y1="${py(ya).toFixed(2)}" x2="${px(o.xMax).toFixed(2)}" y2="${py(yb).toFixed(2)}" stroke="${o.color}" stroke-width="2" stroke-dasharray="6 4"/>`,
    );
  }

  // legend
  let ly = MARGIN.top + 8;
  const legend: Array<[string, string]> = series.map((s) => [s.label, s.color]);
  if (opts.overlay?.label) {
    legend.push([opts.overlay.label, opts.overlay.color]);
  }
  for (const [label, color] of legend) {
    const lx = MARGIN.left + plotW - 150;
    parts.push(
      `<rect x="${lx}" y="${ly - 9}" width="12" height="12" fill="${color}"/>`,
      `<text x="${lx + 18}" y="${ly + 2}" font-size="12">${escapeXml(label)}</text>`,
    );
    ly += 18;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function rangeInt(a: number, b: number): number[] {
  const out: number[] = [];
  for (let v = a; v <= b; v++) out.push(v);
  if (out.length === 0) out.push(a);
  return out;
}
