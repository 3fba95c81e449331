import { mkdirSync, writeFileSync } from "fs";
import path from "path";
import { expandInputs, numericColumn, readTable } from "./csv.js";
import { slopeFit } from "./fit.js";
import { buildChart, PALETTE, type ScaleKind, type Series } from "./svg.js";
import type { FigureSpec, Table } from "./types.js";

const MIN_LOG_VALUE = 1e-16;

interface Axes {
  xLabel: string;
  yLabel: string;
  xScale: ScaleKind;
  yScale: ScaleKind;
  title: string;
}

/** Build the figure for a spec and return the SVG text (pure). */
export function renderFigure(spec: FigureSpec): string {
  const tables = expandInputs(spec.inputs).map(readTable);
  let series: Series[];
  let axes: Axes;
  switch (spec.kind) {
    case "trajectory":
      [series, axes] = trajectoryFigure(tables);
      break;
    case "gap-scaling":
      [series, axes] = gapScalingFigure(tables);
      break;
    case "fixedpoint-error":
      [series, axes] = fixedPointFigure(tables);
      break;
    case "threshold":
      [series, axes] = thresholdFigure(tables);
      break;
  }
  return buildChart({
    title: spec.title ?? axes.title,
    xLabel: axes.xLabel,
    yLabel: axes.yLabel,
    xScale: spec.xScale ?? axes.xScale,
    yScale: spec.yScale ?? axes.yScale,
    series,
  });
}

/** Render and write spec.output; nothing is written if rendering fails. */
export function render(spec: FigureSpec): string {
  const svg = renderFigure(spec);
  mkdirSync(path.dirname(spec.output), { recursive: true });
  writeFileSync(spec.output, svg);
  return spec.output;
}

// --------------------------------------------------------------------------

function alphaFromName(file: string): number | null {
  const m = path.basename(file).match(/a([0-9.eE+-]+)_s[0-9.eE+-]+\.csv$/);
  return m ? Number(m[1]) : null;
}

function trajectoryFigure(tables: Table[]): [Series[], Axes] {
  const labelled = tables.map((t) => {
    const alpha = alphaFromName(t.path);
    const iters = numericColumn(t, "iter");
    const infid = numericColumn(t, "infidelity").map((v) =>
      Math.max(v, MIN_LOG_VALUE)
    );
    return {
      alpha,
      label: alpha === null ? path.basename(t.path) : `α=${alpha}`,
      points: iters.map((it, i) => [it, infid[i]] as [number, number]),
    };
  });
  // Legend ordered by alpha descending; unlabelled files keep input order.
  labelled.sort((a, b) => (b.alpha ?? -Infinity) - (a.alpha ?? -Infinity));
  const series = labelled.map((l, i) => ({
    label: l.label,
    points: l.points,
    color: PALETTE[i % PALETTE.length],
  }));
  return [
    series,
    {
      title: "Infidelity vs iteration",
      xLabel: "iteration",
      yLabel: "infidelity",
      xScale: "linear",
      yScale: "log",
    },
  ];
}

function groupBySigma(tables: Table[], xCol: string, yCol: string) {
  const groups = new Map<number, Array<[number, number]>>();
  for (const t of tables) {
    const sigmas = numericColumn(t, "sigma");
    const xs = numericColumn(t, xCol);
    const ys = numericColumn(t, yCol);
    for (let i = 0; i < sigmas.length; i++) {
      if (!groups.has(sigmas[i])) groups.set(sigmas[i], []);
      groups.get(sigmas[i])!.push([xs[i], ys[i]]);
    }
  }
  for (const pts of groups.values()) pts.sort((a, b) => a[0] - b[0]);
  return new Map([...groups.entries()].sort((a, b) => a[0] - b[0]));
}

function gapScalingFigure(tables: Table[]): [Series[], Axes] {
  const groups = groupBySigma(tables, "alpha", "gap");
  const missing: string[] = [];
  for (const [sigma, pts] of groups) {
    const positive = pts.filter(([a, g]) => a > 0 && g > 0);
    if (positive.length < 3) {
      missing.push(
        `sigma=${sigma}: only ${positive.length} usable grid point(s) ` +
          `(alpha ${positive.map(([a]) => a).join(", ") || "none"})`
      );
    }
  }
  if (missing.length > 0) {
    throw new Error(`missing series for slope fit:\n  ${missing.join("\n  ")}`);
  }
  const series = [...groups.entries()].map(([sigma, pts], i) => {
    const fit = slopeFit(pts);
    return {
      label: `σ=${sigma} (slope ${fit.slope.toFixed(2)})`,
      points: pts,
      color: PALETTE[i % PALETTE.length],
      markers: true,
    };
  });
  return [
    series,
    {
      title: "Spectral gap vs coupling strength",
      xLabel: "α",
      yLabel: "gap",
      xScale: "log",
      yScale: "log",
    },
  ];
}

function fixedPointFigure(tables: Table[]): [Series[], Axes] {
  const points: Array<[number, number]> = [];
  for (const t of tables) {
    const sigmas = numericColumn(t, "sigma");
    const residuals = numericColumn(t, "residual");
    for (let i = 0; i < sigmas.length; i++) points.push([sigmas[i], residuals[i]]);
  }
  points.sort((a, b) => a[0] - b[0]);
  const series = [
    { label: "fixed-point residual", points, color: PALETTE[0], markers: true },
  ];
  return [
    series,
    {
      title: "Fixed-point residual vs σ",
      xLabel: "σ",
      yLabel: "trace-norm residual",
      xScale: "log",
      yScale: "log",
    },
  ];
}

function thresholdFigure(tables: Table[]): [Series[], Axes] {
  const groups = groupBySigma(tables, "ratio", "energy_error");
  const series = [...groups.entries()].map(([sigma, pts], i) => ({
    label: `σ=${sigma}`,
    points: pts.map(
      ([r, e]) => [r, Math.max(e, MIN_LOG_VALUE)] as [number, number]
    ),
    color: PALETTE[i % PALETTE.length],
    markers: true,
  }));
  return [
    series,
    {
      title: "Final energy error vs α/√σ",
      xLabel: "α/√σ",
      yLabel: "energy error",
      xScale: "log",
      yScale: "log",
    },
  ];
}
