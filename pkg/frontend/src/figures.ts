/**
 * The four figure kinds and their CSV schemas.
 *
 * Each gfseq CSV layout is accepted by exactly one kind:
 *   cost-trace        iteration,best_cost
 *   phase-transition  m_over_n,k_over_m_transition
 *   papr-ccdf         papr_db,prob_exceed
 *   aud-ce            snr_db|antennas,aer,nmse,trials
 */

import { readFileSync } from "fs";
import { column, matchSchema, parseCsv, PlotError, Table } from "./csv.js";
import { PALETTE, Panel, renderFigure, Series } from "./svg.js";

export type FigureKind = "cost-trace" | "phase-transition" | "papr-ccdf" | "aud-ce";

export const KINDS: FigureKind[] = ["cost-trace", "phase-transition", "papr-ccdf", "aud-ce"];

export interface FigureInput {
  path: string;
  label: string;
}

export interface FigureSpec {
  kind: FigureKind;
  inputs: FigureInput[];
  output: string;
}

/** Log-scale points must be positive and finite; drop the rest loudly. */
function dropUnplottable(x: number[], y: number[], label: string, path: string): [number[], number[]] {
  const keep = y.map((v) => Number.isFinite(v) && v > 0);
  const dropped = keep.filter((k) => !k).length;
  if (dropped > 0) {
    console.warn(
      `warning: ${path} (${label}): dropped ${dropped} point(s) with zero/non-finite values on a log axis`
    );
  }
  return [x.filter((_, i) => keep[i]), y.filter((_, i) => keep[i])];
}

function loadTables(spec: FigureSpec): Table[] {
  if (spec.inputs.length === 0) {
    throw new PlotError("no input CSV given");
  }
  return spec.inputs.map((inp) => parseCsv(readFileSync(inp.path, "utf-8"), inp.path));
}

export function buildSvg(spec: FigureSpec): string {
  switch (spec.kind) {
    case "cost-trace":
      return costTrace(spec);
    case "phase-transition":
      return phaseTransition(spec);
    case "papr-ccdf":
      return paprCcdf(spec);
    case "aud-ce":
      return audCe(spec);
  }
}

function costTrace(spec: FigureSpec): string {
  const series: Series[] = loadTables(spec).map((t, i) => {
    matchSchema(t, [["iteration", "best_cost"]], "cost-trace");
    return {
      label: spec.inputs[i].label,
      x: column(t, "iteration"),
      y: column(t, "best_cost"),
      color: PALETTE[i % PALETTE.length],
      markers: false,
    };
  });
  const panel: Panel = { xLabel: "iteration", yLabel: "best cost", series };
  return renderFigure("Cost evolution of the fittest chromosome", [panel]);
}

function phaseTransition(spec: FigureSpec): string {
  const series: Series[] = loadTables(spec).map((t, i) => {
    matchSchema(t, [["m_over_n", "k_over_m_transition"]], "phase-transition");
    return {
      label: spec.inputs[i].label,
      x: column(t, "m_over_n"),
      y: column(t, "k_over_m_transition"),
      color: PALETTE[i % PALETTE.length],
    };
  });
  const panel: Panel = { xLabel: "M / N", yLabel: "K / M at 99% success", series };
  return renderFigure("Phase transition under MMV reconstruction", [panel]);
}

function paprCcdf(spec: FigureSpec): string {
  const series: Series[] = loadTables(spec).map((t, i) => {
    matchSchema(t, [["papr_db", "prob_exceed"]], "papr-ccdf");
    const [x, y] = dropUnplottable(
      column(t, "papr_db"), column(t, "prob_exceed"), spec.inputs[i].label, t.path
    );
    return {
      label: spec.inputs[i].label,
      x,
      y,
      color: PALETTE[i % PALETTE.length],
      markers: false,
    };
  });
  const panel: Panel = { xLabel: "PAPR (dB)", yLabel: "P(PAPR > abscissa)", yLog: true, series };
  return renderFigure("PAPR distribution (CCDF)", [panel]);
}

const AUD_CE_LAYOUTS = [
  ["snr_db", "aer", "nmse", "trials"],
  ["antennas", "aer", "nmse", "trials"],
];

const AUD_CE_X_LABEL: Record<string, string> = {
  snr_db: "received SNR per device (dB)",
  antennas: "number of antennas",
};

function audCe(spec: FigureSpec): string {
  const tables = loadTables(spec);
  const layouts = tables.map((t) => matchSchema(t, AUD_CE_LAYOUTS, "aud-ce"));
  const xCol = layouts[0][0];
  if (!layouts.every((l) => l[0] === xCol)) {
    throw new PlotError("aud-ce inputs mix snr_db and antennas sweeps");
  }
  const mk = (metric: "aer" | "nmse"): Series[] =>
    tables.map((t, i) => {
      const [x, y] = dropUnplottable(
        column(t, xCol), column(t, metric), `${spec.inputs[i].label} ${metric}`, t.path
      );
      return { label: spec.inputs[i].label, x, y, color: PALETTE[i % PALETTE.length] };
    });
  const panels: Panel[] = [
    { xLabel: AUD_CE_X_LABEL[xCol], yLabel: "AER", yLog: true, series: mk("aer") },
    { xLabel: AUD_CE_X_LABEL[xCol], yLabel: "NMSE", yLog: true, series: mk("nmse") },
  ];
  return renderFigure("Activity detection and channel estimation", panels);
}
