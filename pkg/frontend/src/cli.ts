#!/usr/bin/env node
/**
 * Figure renderer for ddshape CSV output.
 *
 *   plot coefficients     --in coefficients.csv --out fig.svg
 *   plot spectrum-overlay --in ref.csv,shaped.csv[,more.csv]
 *                         [--labels "ideal,shaped,top-hat"] [--x-column name]
 *                         --out fig.svg
 *   plot envelope         --in envelope.csv --out fig.svg
 *
 * In spectrum overlays the first CSV is the reference curve; any series
 * labelled "shaped" is drawn as markers and must match the reference
 * within 0.05 pointwise, otherwise the command fails.
 */

import { basename } from "node:path";

import { plotCoefficients, plotEnvelope, plotSpectrumOverlay } from "./plots";

interface Args {
  kind: string;
  inputs: string[];
  labels: string[];
  out: string;
  xColumn: string;
}

function usageError(message: string): never {
  console.error(`error: ${message}`);
  console.error(
    "usage: plot <coefficients|spectrum-overlay|envelope> --in a.csv[,b.csv...] " +
      '[--labels "a,b"] [--x-column detuning_kHz] --out fig.svg',
  );
  process.exit(2);
}

function parseArgs(argv: string[]): Args {
  if (argv.length === 0) usageError("missing figure kind");
  const [kind, ...rest] = argv;
  let inputs: string[] = [];
  let labels: string[] = [];
  let out = "";
  let xColumn = "detuning_kHz";
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) usageError(`flag ${flag} needs a value`);
    switch (flag) {
      case "--in":
        inputs = value.split(",").map((s) => s.trim());
        break;
      case "--labels":
        labels = value.split(",").map((s) => s.trim());
        break;
      case "--out":
        out = value;
        break;
      case "--x-column":
        xColumn = value;
        break;
      default:
        usageError(`unknown flag ${flag}`);
    }
  }
  if (inputs.length === 0) usageError("--in is required");
  if (!out) usageError("--out is required");
  return { kind, inputs, labels, out, xColumn };
}

function defaultLabel(path: string): string {
  return basename(path).replace(/\.csv$/, "").replace(/^spectrum_/, "");
}

function main(): void {
  const args = parseArgs(process.argv.slice(2));
  switch (args.kind) {
    case "coefficients":
      plotCoefficients(args.inputs[0], args.out);
      break;
    case "spectrum-overlay": {
      const inputs = args.inputs.map((path, i) => ({
        path,
        label: args.labels[i] ?? defaultLabel(path),
      }));
      const result = plotSpectrumOverlay(inputs, args.out, args.xColumn);
      if (result.maxShapedDeviation !== null) {
        console.log(
          `max |shaped - reference| = ${result.maxShapedDeviation.toExponential(2)}`,
        );
      }
      break;
    }
    case "envelope":
      plotEnvelope(args.inputs[0], args.out);
      break;
    default:
      usageError(`unknown figure kind '${args.kind}'`);
  }
  console.log(`wrote ${args.out}`);
}

main();
