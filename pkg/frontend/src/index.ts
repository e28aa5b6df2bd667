/**
 * Thin wrapper over the sparsepath solver: fit regularization paths for
 * l1/MCP/SCAD-penalized GLMs from in-memory arrays and work with the result.
 *
 * The heavy lifting happens in the solver CLI (driven as a subprocess through
 * its documented CSV/JSON interface), so results are bit-for-bit identical to
 * `sparsepath fit`.  The design matrix is written out exactly once.
 */

import * as fs from "node:fs";

import {
  FitSidecar,
  PathEntry,
  makeTempDir,
  parseFitOutputs,
  removeDir,
  runCli,
  writeDataCsv,
} from "./runner.js";

export const version = "0.1.0";

export interface FitOptions {
  method?: "l1" | "mcp" | "scad";
  family?: "gaussian" | "binomial" | "poisson" | "sqrtlasso";
  nlambda?: number;
  lambda_min_ratio?: number;
  gamma?: number;
  prec?: number;
  type_gaussian?: "naive" | "covariance";
  /** keep the CLI's raw output files and report their prefix */
  keep_files?: boolean;
}

export interface PlotTable {
  /** "lambda" followed by every feature that is ever nonzero, in order of first entry */
  header: string[];
  /** one row per lambda, largest first: [lambda, coef_1, coef_2, ...] */
  rows: number[][];
}

export interface Diagnostics {
  kkt_residuals: number[];
  inner_sweep_counts: number[];
  middle_round_counts: number[];
  newton_step_counts: number[];
  kkt_scan_counts: number[];
  converged: boolean[];
}

/** Solution path plus diagnostics, mirroring the solver's PathFit. */
export class BoundPathResult {
  readonly lambdas: number[];
  readonly intercepts: number[];
  readonly sigmas: number[] | null;
  readonly featureNames: string[];
  readonly diagnostics: Diagnostics;
  readonly config: Record<string, unknown>;
  readonly solverVersion: string;
  readonly n: number;
  readonly d: number;
  readonly entries: PathEntry[];
  readonly outputPrefix: string | null;
  private dense: number[][] | null = null;

  constructor(sidecar: FitSidecar, entries: PathEntry[], outputPrefix: string | null) {
    this.lambdas = sidecar.lambdas;
    this.intercepts = sidecar.intercepts;
    this.sigmas = sidecar.sigmas;
    this.featureNames = sidecar.feature_names;
    this.diagnostics = {
      kkt_residuals: sidecar.kkt_residuals,
      inner_sweep_counts: sidecar.inner_sweep_counts,
      middle_round_counts: sidecar.middle_round_counts,
      newton_step_counts: sidecar.newton_step_counts,
      kkt_scan_counts: sidecar.kkt_scan_counts,
      converged: sidecar.converged,
    };
    this.config = sidecar.config;
    this.solverVersion = sidecar.version;
    this.n = sidecar.n;
    this.d = sidecar.d;
    this.entries = entries;
    this.outputPrefix = outputPrefix;
  }

  /** Densified d x K coefficient matrix (built on demand, cached). */
  coefficients(): number[][] {
    if (this.dense === null) {
      const K = this.lambdas.length;
      const index = new Map(this.featureNames.map((name, j) => [name, j]));
      const dense = Array.from({ length: this.d }, () => new Array<number>(K).fill(0));
      for (const e of this.entries) {
        const j = index.get(e.feature);
        if (j === undefined) {
          throw new Error(`unknown feature in path table: ${e.feature}`);
        }
        dense[j][e.lambdaIndex] = e.coefficient;
      }
      this.dense = dense;
    }
    return this.dense;
  }

  /** Nonzero feature names at path point k. */
  support(k: number): string[] {
    const names = new Set<string>();
    for (const e of this.entries) {
      if (e.lambdaIndex === k) names.add(e.feature);
    }
    return this.featureNames.filter((f) => names.has(f));
  }

  /** Compact per-path-point text summary. */
  summary(): string {
    const counts = new Array<number>(this.lambdas.length).fill(0);
    for (const e of this.entries) counts[e.lambdaIndex] += 1;
    const lines = ["k\tlambda\tnonzeros\tkkt_residual\tconverged"];
    for (let k = 0; k < this.lambdas.length; k++) {
      lines.push(
        `${k}\t${this.lambdas[k].toPrecision(6)}\t${counts[k]}\t` +
          `${this.diagnostics.kkt_residuals[k].toExponential(2)}\t` +
          `${this.diagnostics.converged[k]}`,
      );
    }
    return lines.join("\n");
  }
}

/**
 * Fit a full regularization path.  Defaults mirror the solver's PathConfig:
 * nlambda=100, lambda_min_ratio=0.05, prec=1e-4, method=l1, family=gaussian.
 */
export function fit(x: number[][], y: number[], options: FitOptions = {}): BoundPathResult {
  const dir = makeTempDir();
  try {
    const csv = writeDataCsv(dir, x, y);
    const prefix = `${dir}/fit`;
    const args = [
      "fit",
      "--input", csv,
      "--has-header",
      "--response", "y",
      "--output", prefix,
      "--method", options.method ?? "l1",
      "--family", options.family ?? "gaussian",
      "--nlambda", String(options.nlambda ?? 100),
      "--lambda-min-ratio", String(options.lambda_min_ratio ?? 0.05),
      "--prec", String(options.prec ?? 1e-4),
    ];
    if (options.gamma !== undefined) args.push("--gamma", String(options.gamma));
    if (options.type_gaussian !== undefined) args.push("--type-gaussian", options.type_gaussian);
    runCli(args);
    const { sidecar, entries } = parseFitOutputs(prefix);
    return new BoundPathResult(sidecar, entries, options.keep_files ? prefix : null);
  } finally {
    if (!options.keep_files) removeDir(dir);
  }
}

/**
 * Wide-format path table with the same semantics as `sparsepath plot`:
 * rows are lambdas in decreasing order, columns are the features that ever
 * become nonzero (in order of first appearance in the fit table).  When
 * `svgPath` is given, also writes a self-contained SVG of the trajectories
 * against log(lambda).
 */
export function plot(result: BoundPathResult, svgPath?: string): PlotTable {
  const features: string[] = [];
  const values = new Map<string, Map<number, number>>();
  for (const e of result.entries) {
    let col = values.get(e.feature);
    if (col === undefined) {
      features.push(e.feature);
      col = new Map();
      values.set(e.feature, col);
    }
    col.set(e.lambdaIndex, e.coefficient);
  }
  const rows = result.lambdas.map((lam, k) => [
    lam,
    ...features.map((f) => values.get(f)!.get(k) ?? 0),
  ]);
  const table: PlotTable = { header: ["lambda", ...features], rows };
  if (svgPath !== undefined) {
    fs.writeFileSync(svgPath, renderSvg(table), "utf-8");
  }
  return table;
}

function renderSvg(table: PlotTable, width = 640, height = 420): string {
  const pad = 45;
  const K = table.rows.length;
  const nSeries = table.header.length - 1;
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  ];
  if (K > 0 && nSeries > 0) {
    const logs = table.rows.map((r) => Math.log(r[0]));
    const xmin = Math.min(...logs);
    const xmax = Math.max(...logs);
    let ymin = 0;
    let ymax = 0;
    for (const r of table.rows) {
      for (let j = 1; j < r.length; j++) {
        ymin = Math.min(ymin, r[j]);
        ymax = Math.max(ymax, r[j]);
      }
    }
    if (ymax === ymin) ymax = ymin + 1;
    const sx = (v: number) =>
      pad + (xmax === xmin ? 0.5 : (xmax - Math.log(v)) / (xmax - xmin)) * (width - 2 * pad);
    const sy = (v: number) => height - pad - ((v - ymin) / (ymax - ymin)) * (height - 2 * pad);
    const zero = sy(0);
    parts.push(
      `<line x1="${pad}" y1="${zero}" x2="${width - pad}" y2="${zero}" stroke="#999" stroke-dasharray="4 3"/>`,
    );
    for (let j = 1; j <= nSeries; j++) {
      const pts = table.rows.map((r) => `${sx(r[0]).toFixed(2)},${sy(r[j]).toFixed(2)}`);
      const hue = Math.round((360 * (j - 1)) / nSeries);
      parts.push(
        `<polyline fill="none" stroke="hsl(${hue},65%,45%)" stroke-width="1.2" points="${pts.join(" ")}"/>`,
      );
    }
  }
  parts.push(
    `<text x="${width / 2}" y="${height - 8}" text-anchor="middle" font-size="12">lambda (log scale, decreasing)</text>`,
    `<text x="14" y="${height / 2}" transform="rotate(-90 14 ${height / 2})" text-anchor="middle" font-size="12">coefficient</text>`,
    "</svg>",
  );
  return parts.join("\n");
}
