/**
 * Differential driver for generated data units.
 *
 * Asks the compactor CLI for a fixture bundle (reference.c, compacted.c,
 * main_ref.c, main_cmp.c, expected.txt), compiles both mains, runs them,
 * and compares the dumps byte for byte against each other and against
 * expected.txt.
 *
 * Exit codes: 0 dumps match, 1 mismatch or build failure, 77 no C compiler.
 */

import { spawnSync } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { pathToFileURL } from "node:url";

export const EXIT_MATCH = 0;
export const EXIT_MISMATCH = 1;
export const EXIT_NO_COMPILER = 77;

export interface DriveOptions {
  specPath: string;
  workDir: string;
  /** C compiler; defaults to $COMPACTOR_CC, then "cc". */
  cc?: string;
  /** How to invoke the compactor CLI; defaults to $COMPACTOR_CMD, then "compactor". */
  compactorCmd?: string[];
}

export interface DriveResult {
  code: number;
  detail: string;
  refDump?: Buffer;
  cmpDump?: Buffer;
  expected?: Buffer;
}

export function resolveCompiler(cc?: string): string {
  return cc ?? process.env.COMPACTOR_CC ?? "cc";
}

export function resolveCompactorCmd(cmd?: string[]): string[] {
  if (cmd && cmd.length > 0) return cmd;
  const env = process.env.COMPACTOR_CMD;
  return env ? env.split(" ").filter((s) => s.length > 0) : ["compactor"];
}

export function compilerAvailable(cc: string): boolean {
  const probe = spawnSync(cc, ["--version"], { stdio: "ignore" });
  return !probe.error && probe.status === 0;
}

function specUsesLossy(specPath: string): boolean {
  try {
    const doc = JSON.parse(readFileSync(specPath, "utf-8"));
    return Boolean(doc?.options?.methods?.includes?.("lossy"));
  } catch {
    return false;
  }
}

export function generateBundle(specPath: string, outDir: string, compactorCmd?: string[]): string | null {
  const [exe, ...pre] = resolveCompactorCmd(compactorCmd);
  const gen = spawnSync(exe, [...pre, "harness", "--input", specPath, "--out-dir", outDir], {
    encoding: "utf-8",
  });
  if (gen.error) return `cannot invoke '${exe}': ${gen.error.message}`;
  if (gen.status !== 0) return `bundle generation failed (exit ${gen.status}): ${gen.stderr}`;
  return null;
}

function compile(cc: string, workDir: string, mainFile: string, exe: string): string | null {
  const cp = spawnSync(cc, ["-O1", "-Wall", "-o", exe, mainFile], {
    cwd: workDir,
    encoding: "utf-8",
  });
  if (cp.error) return `cannot invoke '${cc}': ${cp.error.message}`;
  if (cp.status !== 0) return `compiling ${mainFile} failed:\n${cp.stderr}`;
  return null;
}

function runBinary(workDir: string, exe: string): { out?: Buffer; err?: string } {
  const run = spawnSync(join(workDir, exe), [], { cwd: workDir });
  if (run.error) return { err: `running ${exe} failed: ${run.error.message}` };
  if (run.status !== 0) return { err: `${exe} exited with ${run.status}: ${run.stderr}` };
  return { out: run.stdout };
}

export function runDifferential(opts: DriveOptions): DriveResult {
  const cc = resolveCompiler(opts.cc);
  if (!compilerAvailable(cc)) {
    return { code: EXIT_NO_COMPILER, detail: `C compiler '${cc}' is not available` };
  }
  const genErr = generateBundle(opts.specPath, opts.workDir, opts.compactorCmd);
  if (genErr) return { code: EXIT_MISMATCH, detail: genErr };

  for (const [mainFile, exe] of [
    ["main_ref.c", "ref_bin"],
    ["main_cmp.c", "cmp_bin"],
  ] as const) {
    const err = compile(cc, opts.workDir, mainFile, exe);
    if (err) return { code: EXIT_MISMATCH, detail: err };
  }

  const ref = runBinary(opts.workDir, "ref_bin");
  if (ref.err) return { code: EXIT_MISMATCH, detail: ref.err };
  const cmp = runBinary(opts.workDir, "cmp_bin");
  if (cmp.err) return { code: EXIT_MISMATCH, detail: cmp.err };
  const expected = readFileSync(join(opts.workDir, "expected.txt"));
  const partial = { refDump: ref.out, cmpDump: cmp.out, expected };

  if (!cmp.out!.equals(expected)) {
    return {
      code: EXIT_MISMATCH,
      detail: "compacted dump differs from the expected model dump",
      ...partial,
    };
  }
  // a lossy run legitimately changes values, so the reference dump is only
  // required to match for lossless method sets
  if (specUsesLossy(opts.specPath)) {
    return {
      code: EXIT_MATCH,
      detail: "compacted dump is byte-identical to the post-merge model (lossy run)",
      ...partial,
    };
  }
  if (!ref.out!.equals(cmp.out!)) {
    return { code: EXIT_MISMATCH, detail: "reference and compacted dumps differ", ...partial };
  }
  return { code: EXIT_MATCH, detail: "dumps are byte-identical", ...partial };
}

export function main(argv: string[]): number {
  let specPath = "";
  let workDir = "";
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--input") specPath = argv[++i] ?? "";
    else if (argv[i] === "--workdir") workDir = argv[++i] ?? "";
    else {
      console.error(`unknown argument: ${argv[i]}`);
      return EXIT_MISMATCH;
    }
  }
  if (!specPath || !workDir) {
    console.error("usage: driver --input <spec.json> --workdir <dir>");
    return EXIT_MISMATCH;
  }
  const result = runDifferential({ specPath, workDir });
  console.log(result.detail);
  return result.code;
}

const invokedDirectly =
  typeof process.argv[1] === "string" &&
  import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
