export { slopeFit, type SlopeFit } from "./fit.js";
export { render, renderFigure } from "./render.js";
export { expandInputs, readTable, numericColumn } from "./csv.js";
export { buildChart, PALETTE } from "./svg.js";
export { FigureSpecSchema, figureKinds, type FigureSpec } from "./types.js";
