/**
 * Snapshot diffing for the highlight layer.  Mirrors the engine's
 * snapshot_diff exactly (same fields, same ordering) so highlights can be
 * validated against the core's output.
 */

import { Snapshot, stableStringify } from "./protocol";

export interface FieldChange {
  field: string;
  from: unknown;
  to: unknown;
}

export interface SnapshotDiff {
  added: string[];
  removed: string[];
  changed: Record<string, FieldChange[]>;
  mode?: { from: string | null; to: string | null };
  root?: { from: unknown; to: unknown };
}

const eq = (a: unknown, b: unknown): boolean =>
  stableStringify(a ?? null) === stableStringify(b ?? null);

const byPath = (a: string, b: string): number => Number(a) - Number(b);

export function snapshotDiff(a: Snapshot, b: Snapshot): SnapshotDiff {
  const diff: SnapshotDiff = { added: [], removed: [], changed: {} };
  if (a.mode !== b.mode) diff.mode = { from: a.mode, to: b.mode };
  if (!eq(a.root, b.root)) diff.root = { from: a.root, to: b.root };
  const viewsA = a.views ?? {};
  const viewsB = b.views ?? {};
  diff.added = Object.keys(viewsB).filter((p) => !(p in viewsA)).sort(byPath);
  diff.removed = Object.keys(viewsA).filter((p) => !(p in viewsB)).sort(byPath);
  const shared = Object.keys(viewsA).filter((p) => p in viewsB).sort(byPath);
  for (const path of shared) {
    const va = viewsA[path];
    const vb = viewsB[path];
    const changes: FieldChange[] = [];
    for (const field of ["spec", "dec", "effq_len", "child"] as const) {
      if (!eq(va[field], vb[field])) {
        changes.push({ field, from: va[field], to: vb[field] });
      }
    }
    for (const label of Object.keys(va.sttst)) {
      if (label in vb.sttst) {
        const ea = va.sttst[label];
        const eb = vb.sttst[label];
        for (const field of ["val", "sttq_len"] as const) {
          if (!eq(ea[field], eb[field])) {
            changes.push({
              field: `sttst.${label}.${field}`,
              from: ea[field],
              to: eb[field],
            });
          }
        }
      } else {
        changes.push({ field: `sttst.${label}`, from: va.sttst[label], to: null });
      }
    }
    for (const label of Object.keys(vb.sttst)) {
      if (!(label in va.sttst)) {
        changes.push({ field: `sttst.${label}`, from: null, to: vb.sttst[label] });
      }
    }
    if (changes.length > 0) diff.changed[path] = changes;
  }
  return diff;
}

export function isEmptyDiff(diff: SnapshotDiff): boolean {
  return (
    diff.added.length === 0 &&
    diff.removed.length === 0 &&
    Object.keys(diff.changed).length === 0 &&
    diff.mode === undefined &&
    diff.root === undefined
  );
}
