import { z } from "zod";

export const figureKinds = [
  "trajectory",
  "gap-scaling",
  "fixedpoint-error",
  "threshold",
] as const;

export type FigureKind = (typeof figureKinds)[number];

/**
 * One figure per spec.  `inputs` are file paths or simple globs (a `*` in the
 * basename); every pattern must match at least one existing file.  Only the
 * vector (svg) format is implemented — it is the deterministic contract.
 */
export const FigureSpecSchema = z.object({
  kind: z.enum(figureKinds),
  inputs: z.array(z.string()).min(1),
  output: z.string(),
  format: z.literal("svg").default("svg"),
  xScale: z.enum(["linear", "log"]).optional(),
  yScale: z.enum(["linear", "log"]).optional(),
  title: z.string().optional(),
});

export type FigureSpec = z.infer<typeof FigureSpecSchema>;

export interface Table {
  path: string;
  rows: Record<string, number | string>[];
}
