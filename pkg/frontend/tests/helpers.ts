import { execFileSync } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

export const REPO_ROOT = resolve(__dirname, "..", "..");
export const PROGRAMS = join(REPO_ROOT, "programs");

export function cliTrace(program: string, events = ""): string {
  const dir = mkdtempSync(join(tmpdir(), "rtrace-"));
  const out = join(dir, "out.rtrace.json");
  const args = ["-m", "minireact.cli", "trace", join(PROGRAMS, program), "-o", out];
  if (events !== "") args.push("--events", events);
  execFileSync("python3", args, { stdio: ["ignore", "ignore", "ignore"] });
  return readFileSync(out, "utf-8");
}

export function readProgram(name: string): string {
  return readFileSync(join(PROGRAMS, name), "utf-8");
}

export function coreDiffs(traceText: string): unknown[] {
  const script = [
    "import json, sys",
    "from minireact.trace import snapshot_diff",
    "trace = json.loads(sys.stdin.read())",
    "snaps = [s['snapshot'] for s in trace['steps']]",
    "diffs = [snapshot_diff(a, b) for a, b in zip(snaps, snaps[1:])]",
    "print(json.dumps(diffs, sort_keys=True, separators=(',', ':')))",
  ].join("\n");
  const out = execFileSync("python3", ["-c", script], { input: traceText });
  return JSON.parse(out.toString());
}
