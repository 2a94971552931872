/** Ordinary least squares line fit. */

export interface LineFit {
  slope: number;
  intercept: number;
}

export function leastSquares(xs: number[], ys: number[]): LineFit {
  if (xs.length !== ys.length) {
    throw new Error(`fit inputs differ in length: ${xs.length} vs ${ys.length}`);
  }
  const n = xs.length;
  if (n === 0) {
    throw new Error("cannot fit an empty series");
  }
  const meanX = xs.reduce((a, b) => a + b, 0) / n;
  const meanY = ys.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    const dx = xs[i] - meanX;
    sxx += dx * dx;
    sxy += dx * (ys[i] - meanY);
  }
  if (sxx === 0) {
    return { slope: 0, intercept: meanY };
  }
  const slope = sxy / sxx;
  return { slope, intercept: meanY - slope * meanX };
}
