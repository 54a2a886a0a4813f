import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { getColumn, readCsv } from "./csv";
import { renderPlot, Series } from "./svg";

/** Shaped markers drifted off the reference curve beyond the bound. */
export class OverlayDeviationError extends Error {
  constructor(
    readonly deviation: number,
    readonly bound: number,
  ) {
    super(
      `shaped spectrum deviates from the reference by ${deviation.toFixed(4)} ` +
        `(bound ${bound})`,
    );
    this.name = "OverlayDeviationError";
  }
}

const PALETTE = ["#1f77b4", "#222222", "#d62728", "#e8b028", "#2ca02c", "#9467bd"];

/** Maximum tolerated pointwise |shaped - reference| in a spectrum overlay. */
export const OVERLAY_BOUND = 0.05;

function writeSvg(outPath: string, svg: string): void {
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, svg, "utf8");
}

/**
 * Harmonic-weight decay curves |f_l(alpha)| from a (l, alpha, f_l, abs_f_l)
 * table, one curve per harmonic.
 */
export function plotCoefficients(csvPath: string, outPath: string): void {
  const table = readCsv(csvPath);
  const ls = getColumn(table, "l");
  const alphas = getColumn(table, "alpha");
  const absF = getColumn(table, "abs_f_l");

  const byHarmonic = new Map<number, { x: number[]; y: number[] }>();
  for (let i = 0; i < table.rowCount; i++) {
    let group = byHarmonic.get(ls[i]);
    if (!group) {
      group = { x: [], y: [] };
      byHarmonic.set(ls[i], group);
    }
    group.x.push(alphas[i]);
    group.y.push(absF[i]);
  }

  const series: Series[] = [...byHarmonic.entries()]
    .sort(([a], [b]) => a - b)
    .map(([l, group], i) => ({
      label: `l = ${l}`,
      x: group.x,
      y: group.y,
      color: PALETTE[i % PALETTE.length],
    }));

  // highlight the unit-width point of the middle harmonic when present
  const middle = [...byHarmonic.keys()].sort((a, b) => a - b)[
    Math.floor(byHarmonic.size / 2)
  ];
  const group = byHarmonic.get(middle)!;
  const atOne = group.x.findIndex((a) => Math.abs(a - 1.0) < 1e-9);
  if (atOne >= 0) {
    series.push({
      label: `|f_${middle}(1)| = ${group.y[atOne].toFixed(4)}`,
      x: [1.0],
      y: [group.y[atOne]],
      color: "#d62728",
      line: false,
      markers: true,
    });
  }

  writeSvg(
    outPath,
    renderPlot(
      {
        title: "Harmonic weight decay with pulse width",
        xLabel: "pulse width alpha (target-harmonic periods)",
        yLabel: "|f_l|",
      },
      series,
    ),
  );
}

export interface SpectrumInput {
  path: string;
  label: string;
}

export interface OverlayResult {
  /** max pointwise |shaped - reference|, null when no shaped series given */
  maxShapedDeviation: number | null;
}

/**
 * Overlay of spectrum scans.  The first input is the reference curve;
 * series whose label contains "shaped" are drawn as square markers and
 * must sit on the reference within OVERLAY_BOUND, else the plot is not
 * written and OverlayDeviationError is thrown.
 */
export function plotSpectrumOverlay(
  inputs: SpectrumInput[],
  outPath: string,
  xColumn = "detuning_kHz",
): OverlayResult {
  if (inputs.length < 1) throw new Error("at least one spectrum CSV is required");
  const tables = inputs.map((input) => readCsv(input.path));
  const xs = tables.map((t) => getColumn(t, xColumn));
  const ys = tables.map((t) => getColumn(t, "sigma_x"));

  let maxShapedDeviation: number | null = null;
  inputs.forEach((input, i) => {
    if (i === 0 || !input.label.toLowerCase().includes("shaped")) return;
    if (xs[i].length !== xs[0].length || xs[i].some((x, j) => x !== xs[0][j])) {
      throw new Error(
        `${input.path}: scan grid differs from the reference ${inputs[0].path}`,
      );
    }
    const deviation = Math.max(...ys[i].map((y, j) => Math.abs(y - ys[0][j])));
    maxShapedDeviation = Math.max(maxShapedDeviation ?? 0, deviation);
  });
  if (maxShapedDeviation !== null && maxShapedDeviation > OVERLAY_BOUND) {
    throw new OverlayDeviationError(maxShapedDeviation, OVERLAY_BOUND);
  }

  const series: Series[] = inputs.map((input, i) => {
    const shaped = i > 0 && input.label.toLowerCase().includes("shaped");
    return {
      label: input.label,
      x: xs[i],
      y: ys[i],
      color: PALETTE[i % PALETTE.length],
      line: !shaped,
      markers: shaped,
    };
  });

  writeSvg(
    outPath,
    renderPlot(
      {
        title: "Coherence spectrum",
        xLabel: xColumn === "detuning_kHz" ? "detuning (kHz)" : xColumn,
        yLabel: "<sigma_x>",
      },
      series,
    ),
  );
  return { maxShapedDeviation };
}

/** Drive envelope Omega(t)/2pi from a (t_us, F_z, omega_MHz) waveform table. */
export function plotEnvelope(csvPath: string, outPath: string): void {
  const table = readCsv(csvPath);
  const t = getColumn(table, "t_us");
  const omega = getColumn(table, "omega_MHz");
  const peak = Math.max(...omega.map(Math.abs));
  writeSvg(
    outPath,
    renderPlot(
      {
        title: `Shaped pulse envelope (peak ${peak.toFixed(2)} MHz)`,
        xLabel: "time (us)",
        yLabel: "Omega / 2pi (MHz)",
      },
      [{ label: "Omega(t)", x: t, y: omega, color: PALETTE[0] }],
    ),
  );
}
