#!/usr/bin/env node
/**
 * plot <kind> --in a.csv[:label] [--in b.csv:label ...] --out fig.svg
 *
 * Renders gfseq CSV outputs as SVG. Kinds: cost-trace, phase-transition,
 * papr-ccdf, aud-ce. A label defaults to the file name without extension;
 * text after the last ':' of an --in argument overrides it.
 *
 * Exit codes: 0 success, 2 usage error, 3 validation/render error.
 */

import { writeFileSync } from "fs";
import { basename } from "path";
import { PlotError } from "./csv.js";
import { buildSvg, FigureInput, FigureKind, FigureSpec, KINDS } from "./figures.js";

function usage(message: string): never {
  console.error(`error: ${message}`);
  console.error(`usage: plot <${KINDS.join("|")}> --in a.csv[:label] [--in ...] --out fig.svg`);
  process.exit(2);
}

function parseInput(arg: string): FigureInput {
  const colon = arg.lastIndexOf(":");
  if (colon > 0 && !arg.slice(colon + 1).includes("/")) {
    return { path: arg.slice(0, colon), label: arg.slice(colon + 1) };
  }
  return { path: arg, label: basename(arg).replace(/\.[^.]+$/, "") };
}

export function parseArgs(argv: string[]): FigureSpec {
  if (argv.length === 0) {
    usage("missing figure kind");
  }
  const kind = argv[0] as FigureKind;
  if (!KINDS.includes(kind)) {
    usage(`unknown figure kind "${argv[0]}"`);
  }
  const inputs: FigureInput[] = [];
  let output = "";
  for (let i = 1; i < argv.length; i++) {
    if (argv[i] === "--in") {
      if (i + 1 >= argv.length) usage("--in needs a value");
      inputs.push(parseInput(argv[++i]));
    } else if (argv[i] === "--out") {
      if (i + 1 >= argv.length) usage("--out needs a value");
      output = argv[++i];
    } else {
      usage(`unknown argument "${argv[i]}"`);
    }
  }
  if (inputs.length === 0) usage("at least one --in is required");
  if (!output) usage("--out is required");
  return { kind, inputs, output };
}

export function main(argv: string[]): number {
  const spec = parseArgs(argv);
  try {
    writeFileSync(spec.output, buildSvg(spec));
  } catch (e) {
    if (e instanceof PlotError || (e as NodeJS.ErrnoException).code === "ENOENT") {
      console.error(`error: ${(e as Error).message}`);
      return 3;
    }
    throw e;
  }
  return 0;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("gfseq-plot")) {
  process.exit(main(process.argv.slice(2)));
}
