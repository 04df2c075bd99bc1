import { describe, expect, it } from "vitest";

import { isEmptyDiff, snapshotDiff } from "../src/diff";
import { Snapshot, stableStringify } from "../src/protocol";
import { loadTrace } from "../src/session";
import { cliTrace, coreDiffs } from "./helpers";

describe("snapshot diffs", () => {
  it("matches the engine's own diff output on the demo run", () => {
    const text = cliTrace("demo.rtr");
    const session = loadTrace(text);
    const expected = coreDiffs(text);
    for (let i = 1; i < session.stepCount; i += 1) {
      const mine = snapshotDiff(
        session.snapshotAt(i - 1), session.snapshotAt(i));
      expect(stableStringify(mine)).toBe(stableStringify(expected[i - 1]));
    }
  });

  it("matches the engine's diffs across an unmount", () => {
    const text = cliTrace("parent_child.rtr");
    const session = loadTrace(text);
    const expected = coreDiffs(text);
    for (let i = 1; i < session.stepCount; i += 1) {
      const mine = snapshotDiff(
        session.snapshotAt(i - 1), session.snapshotAt(i));
      expect(stableStringify(mine)).toBe(stableStringify(expected[i - 1]));
    }
  });

  it("reports an empty diff for identical snapshots", () => {
    const session = loadTrace(cliTrace("demo.rtr"));
    const snap = session.snapshotAt(2);
    expect(isEmptyDiff(snapshotDiff(snap, snap))).toBe(true);
  });

  it("flags added views and value changes", () => {
    const a: Snapshot = { root: { kind: "path", path: 0 }, mode: "Check", views: {
      "0": { spec: { name: "C", arg: 0 }, dec: [], effq_len: 0, child: null,
             sttst: { "0": { val: 1, sttq_len: 0, sttq: [] } } },
    } };
    const b: Snapshot = { root: { kind: "path", path: 0 }, mode: "Rendered", views: {
      "0": { spec: { name: "C", arg: 0 }, dec: ["Effect"], effq_len: 1, child: null,
             sttst: { "0": { val: 2, sttq_len: 0, sttq: [] } } },
      "1": { spec: { name: "D", arg: 0 }, dec: ["Effect"], effq_len: 0, child: null,
             sttst: {} },
    } };
    const diff = snapshotDiff(a, b);
    expect(diff.added).toEqual(["1"]);
    expect(diff.removed).toEqual([]);
    expect(diff.mode).toEqual({ from: "Check", to: "Rendered" });
    const fields = diff.changed["0"].map((c) => c.field);
    expect(fields).toEqual(["dec", "effq_len", "sttst.0.val"]);
  });
});
