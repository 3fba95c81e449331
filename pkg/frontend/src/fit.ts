export interface SlopeFit {
  slope: number;
  intercept: number;
  r2: number;
}

/**
 * Least-squares power-law fit: regress log(y) on log(x).
 * Requires at least 3 strictly positive points.
 */
export function slopeFit(points: Array<[number, number]>): SlopeFit {
  if (points.length < 3) {
    throw new Error(`slopeFit needs >= 3 points, got ${points.length}`);
  }
  for (const [x, y] of points) {
    if (!(x > 0) || !(y > 0)) {
      throw new Error(`slopeFit requires positive values, got (${x}, ${y})`);
    }
  }
  const lx = points.map(([x]) => Math.log(x));
  const ly = points.map(([, y]) => Math.log(y));
  const n = points.length;
  const mx = lx.reduce((a, b) => a + b, 0) / n;
  const my = ly.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  let syy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (lx[i] - mx) ** 2;
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) ** 2;
  }
  if (sxx === 0) {
    throw new Error("slopeFit: all x values identical");
  }
  const slope = sxy / sxx;
  const intercept = my - slope * mx;
  const r2 = syy === 0 ? 1 : (sxy * sxy) / (sxx * syy);
  return { slope, intercept, r2 };
}
