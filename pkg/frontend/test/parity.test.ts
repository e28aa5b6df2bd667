import { spawnSync } from "node:child_process";
import * as fs from "node:fs";
import * as path from "node:path";
import { describe, expect, it } from "vitest";

import { BoundPathResult, fit, plot, version } from "../src/index";
import { makeTempDir, parseFitOutputs, pythonCommand, writeDataCsv } from "../src/runner";

// ---------------------------------------------------------------- test data

/** mulberry32: tiny deterministic PRNG so instances are reproducible. */
function rng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function normals(u: () => number): () => number {
  return () => {
    const a = Math.max(u(), 1e-12);
    const b = u();
    return Math.sqrt(-2 * Math.log(a)) * Math.cos(2 * Math.PI * b);
  };
}

interface Instance {
  name: string;
  x: number[][];
  y: number[];
  options: Parameters<typeof fit>[2];
}

function makeInstance(
  seed: number,
  n: number,
  d: number,
  family: "gaussian" | "binomial" | "poisson" | "sqrtlasso",
  options: Parameters<typeof fit>[2],
): Instance {
  const u = rng(seed);
  const g = normals(u);
  const x = Array.from({ length: n }, () => Array.from({ length: d }, g));
  const beta = new Array<number>(d).fill(0);
  for (let j = 0; j < Math.min(4, d); j++) {
    beta[(j * 7) % d] = (u() < 0.5 ? -1 : 1) * (0.5 + u());
  }
  const y = x.map((row) => {
    let eta = row.reduce((acc, v, j) => acc + v * beta[j], 0);
    if (family === "binomial") {
      return u() < 1 / (1 + Math.exp(-eta)) ? 1 : 0;
    }
    if (family === "poisson") {
      eta = Math.min(eta, 2.0);
      // Knuth sampler, fine for small means
      const limit = Math.exp(-Math.exp(eta));
      let k = 0;
      let p = 1;
      do {
        k += 1;
        p *= u();
      } while (p > limit);
      return k - 1;
    }
    return eta + 0.5 * g();
  });
  return { name: `${family}-${seed}`, x, y, options };
}

const INSTANCES: Instance[] = [
  makeInstance(1, 60, 20, "gaussian", { nlambda: 25 }),
  makeInstance(2, 80, 30, "gaussian", { method: "mcp", gamma: 1.25, nlambda: 20 }),
  makeInstance(3, 70, 25, "binomial", { family: "binomial", nlambda: 20 }),
  makeInstance(4, 60, 20, "poisson", { family: "poisson", nlambda: 15 }),
  makeInstance(5, 60, 25, "sqrtlasso", { family: "sqrtlasso", nlambda: 20 }),
];

function cliArgsFor(options: NonNullable<Parameters<typeof fit>[2]>, csv: string, prefix: string) {
  const args = [
    "fit", "--input", csv, "--has-header", "--response", "y", "--output", prefix,
    "--method", options.method ?? "l1",
    "--family", options.family ?? "gaussian",
    "--nlambda", String(options.nlambda ?? 100),
    "--lambda-min-ratio", String(options.lambda_min_ratio ?? 0.05),
    "--prec", String(options.prec ?? 1e-4),
  ];
  if (options.gamma !== undefined) args.push("--gamma", String(options.gamma));
  return args;
}

function runCliRaw(args: string[]) {
  const proc = spawnSync(pythonCommand(), ["-m", "sparsepath.cli", ...args], {
    encoding: "utf-8",
    maxBuffer: 1 << 28,
  });
  return proc;
}

// ------------------------------------------------------------------- parity

describe("binding parity with the CLI", () => {
  for (const inst of INSTANCES) {
    it(`matches cmd_fit bit-for-bit on ${inst.name}`, () => {
      const result = fit(inst.x, inst.y, { ...inst.options, keep_files: true });
      expect(result.outputPrefix).not.toBeNull();

      // run the CLI independently on the same (byte-identical) CSV
      const dir = makeTempDir();
      const csv = writeDataCsv(dir, inst.x, inst.y);
      const prefix = path.join(dir, "ref");
      const proc = runCliRaw(cliArgsFor(inst.options ?? {}, csv, prefix));
      expect(proc.status, proc.stderr).toBe(0);

      const mineCsv = fs.readFileSync(result.outputPrefix + ".csv", "utf-8");
      const refCsv = fs.readFileSync(prefix + ".csv", "utf-8");
      expect(mineCsv).toBe(refCsv);
      const mineJson = fs.readFileSync(result.outputPrefix + ".json", "utf-8");
      const refJson = fs.readFileSync(prefix + ".json", "utf-8");
      expect(mineJson).toBe(refJson);

      // and the parsed object agrees with an independent parse
      const ref = parseFitOutputs(prefix);
      expect(result.lambdas).toEqual(ref.sidecar.lambdas);
      expect(result.intercepts).toEqual(ref.sidecar.intercepts);
      expect(result.entries).toEqual(ref.entries);
      fs.rmSync(dir, { recursive: true, force: true });
      fs.rmSync(path.dirname(result.outputPrefix!), { recursive: true, force: true });
    });
  }

  it("boundary fidelity holds on 15 further random instances", () => {
    for (let i = 0; i < 15; i++) {
      const family = (["gaussian", "binomial", "gaussian"] as const)[i % 3];
      const inst = makeInstance(100 + i, 40, 10, family, {
        family, nlambda: 10, method: i % 2 ? "l1" : "scad",
      });
      const result = fit(inst.x, inst.y, { ...inst.options, keep_files: true });
      const dir = makeTempDir();
      const csv = writeDataCsv(dir, inst.x, inst.y);
      const prefix = path.join(dir, "ref");
      const proc = runCliRaw(cliArgsFor(inst.options ?? {}, csv, prefix));
      expect(proc.status, proc.stderr).toBe(0);
      const ref = parseFitOutputs(prefix);
      expect(result.lambdas).toEqual(ref.sidecar.lambdas);
      expect(result.entries).toEqual(ref.entries);
      fs.rmSync(dir, { recursive: true, force: true });
      fs.rmSync(path.dirname(result.outputPrefix!), { recursive: true, force: true });
    }
  });

  it("plot table equals cmd_plot output exactly", () => {
    const inst = INSTANCES[0];
    const result = fit(inst.x, inst.y, { ...inst.options, keep_files: true });
    const table = plot(result);

    const wide = path.join(path.dirname(result.outputPrefix!), "wide.csv");
    const proc = runCliRaw(["plot", "--fit", result.outputPrefix!, "--output", wide]);
    expect(proc.status, proc.stderr).toBe(0);
    const lines = fs.readFileSync(wide, "utf-8").split("\n").filter((l) => l.length > 0);
    expect(lines[0].split(",")).toEqual(table.header);
    const refRows = lines.slice(1).map((l) => l.split(",").map(Number));
    expect(refRows.length).toBe(table.rows.length);
    for (let k = 0; k < refRows.length; k++) {
      expect(table.rows[k]).toEqual(refRows[k]);
    }
    fs.rmSync(path.dirname(result.outputPrefix!), { recursive: true, force: true });
  });
});

// ------------------------------------------------------------ behaviors

describe("wrapper behavior", () => {
  it("defaults to a 100-point path", () => {
    const inst = makeInstance(9, 50, 10, "gaussian", {});
    const result = fit(inst.x, inst.y);
    expect(result.lambdas.length).toBe(100);
    expect(result.config["nlambda"]).toBe(100);
    expect(result.config["lambda_min_ratio"]).toBe(0.05);
    expect(result.solverVersion).toBe(version);
  });

  it("accepts mcp with gamma=1.25 and echoes it", () => {
    const inst = makeInstance(10, 50, 12, "gaussian", {});
    const result = fit(inst.x, inst.y, { method: "mcp", gamma: 1.25, nlambda: 10 });
    expect(result.config["gamma"]).toBe(1.25);
    expect(result.config["method"]).toBe("mcp");
  });

  it("surfaces solver errors with the original message", () => {
    const inst = makeInstance(11, 40, 8, "gaussian", {});
    expect(() => fit(inst.x, inst.y, { method: "l1", gamma: 3.0, nlambda: 5 })).toThrowError(
      /gamma/,
    );
  });

  it("handles the all-zero path without error", () => {
    const inst = makeInstance(12, 40, 8, "gaussian", {});
    const result = fit(inst.x, inst.y, { nlambda: 1 });
    expect(result.entries.length).toBe(0);
    const table = plot(result);
    expect(table.header).toEqual(["lambda"]);
    expect(table.rows.length).toBe(1);
    expect(result.coefficients().every((row) => row.every((v) => v === 0))).toBe(true);
  });

  it("densifies coefficients consistently with the sparse entries", () => {
    const inst = makeInstance(13, 60, 15, "gaussian", {});
    const result = fit(inst.x, inst.y, { nlambda: 12 });
    const dense = result.coefficients();
    expect(dense.length).toBe(result.d);
    for (const e of result.entries) {
      const j = result.featureNames.indexOf(e.feature);
      expect(dense[j][e.lambdaIndex]).toBe(e.coefficient);
    }
    const nnz = result.entries.length;
    const denseNnz = dense.flat().filter((v) => v !== 0).length;
    expect(denseNnz).toBe(nnz);
  });

  it("renders distinct figures for distinct regularizers on the same data", () => {
    const inst = makeInstance(14, 50, 10, "gaussian", {});
    const dir = makeTempDir();
    const files: string[] = [];
    for (const method of ["l1", "mcp"] as const) {
      const result = fit(inst.x, inst.y, { method, nlambda: 10 });
      const svg = path.join(dir, `${method}.svg`);
      plot(result, svg);
      files.push(svg);
      const content = fs.readFileSync(svg, "utf-8");
      expect(content.startsWith("<svg")).toBe(true);
      expect(content).toContain("polyline");
    }
    expect(fs.readFileSync(files[0], "utf-8")).not.toBe(fs.readFileSync(files[1], "utf-8"));
    fs.rmSync(dir, { recursive: true, force: true });
  });
});
