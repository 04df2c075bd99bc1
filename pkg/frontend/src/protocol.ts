/**
 * Wire types shared with the engine: the newline-delimited JSON session
 * protocol and the trace-file format, plus a canonical serializer that is
 * byte-compatible with the engine's own (sorted keys, compact separators).
 */

export interface RuleFired {
  rule: string;
  path: number | null;
  label: number | null;
  detail: string;
}

export interface StateEntrySnap {
  val: unknown;
  sttq_len: number;
  sttq: unknown[];
}

export interface ViewSnap {
  spec: { name: string; arg: unknown };
  dec: string[];
  sttst: Record<string, StateEntrySnap>;
  effq_len: number;
  child: unknown;
}

export interface Snapshot {
  root: unknown;
  views: Record<string, ViewSnap>;
  mode: string | null;
}

export interface StepRecord {
  transition: string;
  console: string[];
  rules: RuleFired[];
  snapshot: Snapshot | null;
}

export interface TraceFile {
  format: number;
  program: string;
  budgets: Record<string, number>;
  steps: StepRecord[];
  outcome: Record<string, unknown>;
}

export type SessionRequest =
  | { cmd: "load"; program: string }
  | { cmd: "step" }
  | { cmd: "run_until_idle" }
  | { cmd: "event"; handler: number }
  | { cmd: "snapshot" }
  | { cmd: "reset" };

export interface SessionReply {
  ok: boolean;
  mode: string | null;
  console: string[];
  rules: RuleFired[];
  snapshot: Snapshot | null;
  steps: StepRecord[];
  error?: string;
}

/** One request in flight at a time; replies arrive in request order. */
export interface Transport {
  request(req: SessionRequest): Promise<SessionReply>;
  close(): void;
}

/**
 * Canonical JSON: keys sorted, "," and ":" separators, no added escaping.
 * Matches the engine's trace serializer byte for byte on trace data.
 */
export function stableStringify(value: unknown): string {
  if (value === null || typeof value === "boolean") return JSON.stringify(value);
  if (typeof value === "number") {
    if (!Number.isInteger(value)) throw new Error(`non-integer number: ${value}`);
    return JSON.stringify(value);
  }
  if (typeof value === "string") return JSON.stringify(value);
  if (Array.isArray(value)) {
    return "[" + value.map(stableStringify).join(",") + "]";
  }
  if (typeof value === "object") {
    const record = value as Record<string, unknown>;
    const keys = Object.keys(record).sort();
    const body = keys.map((k) => JSON.stringify(k) + ":" + stableStringify(record[k]));
    return "{" + body.join(",") + "}";
  }
  throw new Error(`cannot serialize ${typeof value}`);
}

export function parseTraceFile(text: string): TraceFile {
  const obj = JSON.parse(text);
  if (typeof obj !== "object" || obj === null || obj.format !== 1) {
    throw new Error("unsupported or missing trace format tag");
  }
  for (const key of ["program", "budgets", "steps", "outcome"]) {
    if (!(key in obj)) throw new Error(`trace file is missing ${key}`);
  }
  return obj as TraceFile;
}

/** Paths reachable from the snapshot's root through child trees. */
export function reachablePaths(snapshot: Snapshot): Set<string> {
  const seen = new Set<string>();
  const walk = (node: unknown): void => {
    if (Array.isArray(node)) {
      for (const item of node) walk(item);
    } else if (node !== null && typeof node === "object") {
      const tagged = node as { kind?: string; path?: number };
      if (tagged.kind === "path" && tagged.path !== undefined) {
        const key = String(tagged.path);
        if (!seen.has(key) && key in snapshot.views) {
          seen.add(key);
          walk(snapshot.views[key].child);
        }
      }
    }
  };
  walk(snapshot.root);
  return seen;
}
