/**
 * Pane models: everything the three panes (tree, explanation, console)
 * render for one slider position.  Models are derived exclusively from
 * step records; the snapshot rides along unmodified so fidelity against
 * the trace is checkable by serialization.
 */

import { snapshotDiff, SnapshotDiff } from "./diff";
import { RuleFired, Snapshot, StepRecord, ViewSnap, reachablePaths } from "./protocol";
import { UiSession } from "./session";

export interface StateBadge {
  label: string;
  val: unknown;
  queued: number;
}

export interface TreeBox {
  path: string;
  componentName: string;
  arg: unknown;
  dec: string[];
  states: StateBadge[];
  pendingEffects: number;
  child: unknown;
  orphaned: boolean;
}

export interface PaneModel {
  stepIndex: number;
  transition: string;
  modeBadge: string | null;
  tree: TreeBox[];
  root: unknown;
  explanation: RuleFired[];
  console: string[];
  snapshot: Snapshot;
  highlights: SnapshotDiff | null;
}

function viewBox(path: string, view: ViewSnap, orphaned: boolean): TreeBox {
  return {
    path,
    componentName: view.spec.name,
    arg: view.spec.arg,
    dec: view.dec,
    states: Object.keys(view.sttst).map((label) => ({
      label,
      val: view.sttst[label].val,
      queued: view.sttst[label].sttq_len,
    })),
    pendingEffects: view.effq_len,
    child: view.child,
    orphaned,
  };
}

export function buildPanes(session: UiSession, index: number): PaneModel {
  const step: StepRecord = session.seek(index);
  if (!step.snapshot) throw new Error(`step ${index} carries no snapshot`);
  const snapshot = step.snapshot;
  const live = reachablePaths(snapshot);
  const boxes = Object.keys(snapshot.views)
    .sort((a, b) => Number(a) - Number(b))
    .map((path) => viewBox(path, snapshot.views[path], !live.has(path)));
  const previous = index > 0 ? session.steps[index - 1].snapshot : null;
  return {
    stepIndex: index,
    transition: step.transition,
    modeBadge: snapshot.mode,
    tree: boxes,
    root: snapshot.root,
    explanation: step.rules,
    console: session.consoleThrough(index),
    snapshot,
    highlights: previous ? snapshotDiff(previous, snapshot) : null,
  };
}
