import { scaleLinear, scaleLog } from "d3-scale";

export type ScaleKind = "linear" | "log";

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
  dash?: string;
  markers?: boolean;
}

export interface ChartOpts {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale: ScaleKind;
  yScale: ScaleKind;
  series: Series[];
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

const W = 640;
const H = 360;
const ML = 66;
const MR = 18;
const MT = 34;
const MB = 50;
const PW = W - ML - MR;
const PH = H - MT - MB;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0).replace("+", "");
  return String(Number(v.toPrecision(4)));
}

function makeScale(kind: ScaleKind, domain: [number, number], range: [number, number]) {
  const s = kind === "log" ? scaleLog() : scaleLinear();
  return s.domain(domain).range(range).nice();
}

/**
 * Render a multi-series line chart as a standalone SVG string.  Everything is
 * fixed (fonts, sizes, palette) and coordinates are rounded, so the same data
 * always yields the same bytes.
 */
export function buildChart(opts: ChartOpts): string {
  const allX = opts.series.flatMap((s) => s.points.map((p) => p[0]));
  const allY = opts.series.flatMap((s) => s.points.map((p) => p[1]));
  if (allX.length === 0) {
    throw new Error("buildChart: no points to plot");
  }
  const x = makeScale(opts.xScale, [Math.min(...allX), Math.max(...allX)], [ML, ML + PW]);
  const y = makeScale(opts.yScale, [Math.min(...allY), Math.max(...allY)], [MT + PH, MT]);

  let s = `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${W} ${H}" font-family="Helvetica, Arial, sans-serif">\n`;
  s += `<rect width="${W}" height="${H}" fill="#fff"/>\n`;
  s += `<text x="${ML}" y="${MT - 12}" font-size="12" font-weight="600" fill="#222">${esc(opts.title)}</text>\n`;

  const xTicks = x.ticks(opts.xScale === "log" ? 6 : 6).filter((t: number) => fmtTick(t) !== "");
  const yTicks = y.ticks(opts.yScale === "log" ? 6 : 6);

  for (const t of yTicks) {
    const yy = y(t).toFixed(2);
    s += `<line x1="${ML}" y1="${yy}" x2="${ML + PW}" y2="${yy}" stroke="#eee" stroke-width="0.6"/>\n`;
    s += `<text x="${ML - 6}" y="${(y(t) + 3.5).toFixed(2)}" text-anchor="end" font-size="9" fill="#555">${esc(fmtTick(t))}</text>\n`;
  }
  for (const t of xTicks) {
    const xx = x(t).toFixed(2);
    s += `<line x1="${xx}" y1="${MT + PH}" x2="${xx}" y2="${MT + PH + 4}" stroke="#333" stroke-width="0.6"/>\n`;
    s += `<text x="${xx}" y="${MT + PH + 16}" text-anchor="middle" font-size="9" fill="#555">${esc(fmtTick(t))}</text>\n`;
  }

  s += `<line x1="${ML}" y1="${MT}" x2="${ML}" y2="${MT + PH}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<line x1="${ML}" y1="${MT + PH}" x2="${ML + PW}" y2="${MT + PH}" stroke="#333" stroke-width="0.8"/>\n`;
  s += `<text x="${ML + PW / 2}" y="${H - 8}" text-anchor="middle" font-size="11" fill="#333">${esc(opts.xLabel)}</text>\n`;
  s += `<text x="16" y="${MT + PH / 2}" text-anchor="middle" font-size="11" fill="#333" transform="rotate(-90,16,${MT + PH / 2})">${esc(opts.yLabel)}</text>\n`;

  for (const sr of opts.series) {
    const pts = sr.points
      .map(([px, py]) => `${x(px).toFixed(2)},${y(py).toFixed(2)}`)
      .join(" ");
    s += `<polyline fill="none" stroke="${sr.color}" stroke-width="1.4"${sr.dash ? ` stroke-dasharray="${sr.dash}"` : ""} points="${pts}"/>\n`;
    if (sr.markers) {
      for (const [px, py] of sr.points) {
        s += `<circle cx="${x(px).toFixed(2)}" cy="${y(py).toFixed(2)}" r="2.6" fill="${sr.color}"/>\n`;
      }
    }
  }

  const legendW = Math.max(...opts.series.map((sr) => sr.label.length)) * 5.6 + 30;
  const legendX = ML + PW - legendW - 6;
  let legendY = MT + 8;
  s += `<rect x="${legendX - 4}" y="${legendY - 8}" width="${legendW + 8}" height="${opts.series.length * 13 + 6}" rx="2" fill="#fff" fill-opacity="0.85" stroke="#ddd" stroke-width="0.5"/>\n`;
  for (const sr of opts.series) {
    s += `<line x1="${legendX}" y1="${legendY}" x2="${legendX + 16}" y2="${legendY}" stroke="${sr.color}" stroke-width="1.4"${sr.dash ? ` stroke-dasharray="${sr.dash}"` : ""}/>\n`;
    s += `<text x="${legendX + 21}" y="${legendY + 3.5}" font-size="9" fill="#333">${esc(sr.label)}</text>\n`;
    legendY += 13;
  }

  s += `</svg>\n`;
  return s;
}
