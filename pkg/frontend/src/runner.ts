import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

/** Resolved command used to reach the solver CLI. */
export function pythonCommand(): string {
  return process.env.SPARSEPATH_PYTHON ?? "python3";
}

/** Run one CLI subcommand; throws with the CLI's own message on failure. */
export function runCli(args: string[]): string {
  const proc = spawnSync(pythonCommand(), ["-m", "sparsepath.cli", ...args], {
    encoding: "utf-8",
    maxBuffer: 1 << 28,
  });
  if (proc.error) {
    throw new Error(`failed to launch sparsepath CLI: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    const message = (proc.stderr || proc.stdout || "").trim();
    throw new Error(message || `sparsepath CLI exited with code ${proc.status}`);
  }
  return proc.stdout;
}

export function makeTempDir(): string {
  return fs.mkdtempSync(path.join(os.tmpdir(), "sparsepath-"));
}

/** Write the design matrix and response as the CSV the CLI ingests (one copy). */
export function writeDataCsv(dir: string, x: number[][], y: number[]): string {
  const n = y.length;
  if (x.length !== n) {
    throw new Error(`x has ${x.length} rows but y has ${n} entries`);
  }
  const d = x[0]?.length ?? 0;
  if (d < 1) {
    throw new Error("x must have at least one column");
  }
  const header = ["y", ...Array.from({ length: d }, (_, j) => `x${j}`)];
  const lines = [header.join(",")];
  for (let i = 0; i < n; i++) {
    const row = x[i];
    if (row.length !== d) {
      throw new Error(`ragged x: row ${i} has ${row.length} cells, expected ${d}`);
    }
    if (!Number.isFinite(y[i]) || row.some((v) => !Number.isFinite(v))) {
      throw new Error(`nonfinite value in row ${i}`);
    }
    lines.push([y[i], ...row].map((v) => String(v)).join(","));
  }
  const file = path.join(dir, "data.csv");
  fs.writeFileSync(file, lines.join("\n") + "\n", "utf-8");
  return file;
}

export interface PathEntry {
  lambdaIndex: number;
  lambda: number;
  feature: string;
  coefficient: number;
}

export interface FitSidecar {
  version: string;
  config: Record<string, unknown>;
  n: number;
  d: number;
  feature_names: string[];
  lambdas: number[];
  intercepts: number[];
  sigmas: number[] | null;
  kkt_residuals: number[];
  inner_sweep_counts: number[];
  middle_round_counts: number[];
  newton_step_counts: number[];
  kkt_scan_counts: number[];
  converged: boolean[];
  dropped_columns: number[];
}

export function parseFitOutputs(prefix: string): { sidecar: FitSidecar; entries: PathEntry[] } {
  const sidecar = JSON.parse(fs.readFileSync(prefix + ".json", "utf-8")) as FitSidecar;
  const text = fs.readFileSync(prefix + ".csv", "utf-8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines[0] !== "lambda_index,lambda,feature,coefficient") {
    throw new Error(`unexpected path-table header: ${lines[0]}`);
  }
  const entries: PathEntry[] = [];
  for (const line of lines.slice(1)) {
    const parts = line.split(",");
    if (parts.length !== 4) {
      throw new Error(`malformed path-table row: ${line}`);
    }
    entries.push({
      lambdaIndex: Number(parts[0]),
      lambda: Number(parts[1]),
      feature: parts[2],
      coefficient: Number(parts[3]),
    });
  }
  return { sidecar, entries };
}

export function removeDir(dir: string): void {
  fs.rmSync(dir, { recursive: true, force: true });
}
