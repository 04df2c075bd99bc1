/**
 * Browser shell: load a trace file, scrub through it with the slider,
 * inspect view boxes, rule firings, and console output.  When a live
 * transport is provided (e.g. a bridge to `serve`), handler buttons
 * dispatch real events and append the new steps.
 */

import { buildPanes, PaneModel, TreeBox } from "./panes";
import { Transport } from "./protocol";
import { LiveSession, UiSession, loadLive, loadTrace } from "./session";

interface Elements {
  slider: HTMLInputElement;
  stepLabel: HTMLElement;
  modeBadge: HTMLElement;
  tree: HTMLElement;
  explanation: HTMLElement;
  consolePane: HTMLElement;
  banner: HTMLElement;
  dispatchRow: HTMLElement;
}

export class App {
  private session: UiSession | null = null;
  private readonly el: Elements;

  constructor(root: Document) {
    this.el = {
      slider: root.getElementById("step-slider") as HTMLInputElement,
      stepLabel: root.getElementById("step-label")!,
      modeBadge: root.getElementById("mode-badge")!,
      tree: root.getElementById("tree-pane")!,
      explanation: root.getElementById("explanation-pane")!,
      consolePane: root.getElementById("console-pane")!,
      banner: root.getElementById("banner")!,
      dispatchRow: root.getElementById("dispatch-row")!,
    };
    this.el.slider.addEventListener("input", () => {
      this.render(Number(this.el.slider.value));
    });
  }

  banner(message: string): void {
    this.el.banner.textContent = message;
    this.el.banner.hidden = message === "";
  }

  openTrace(text: string): void {
    try {
      this.session = loadTrace(text);
    } catch (err) {
      this.banner(`could not load trace: ${(err as Error).message}`);
      return;
    }
    this.banner("");
    this.syncSlider();
  }

  async openLive(transport: Transport, program: string): Promise<void> {
    try {
      this.session = await loadLive(transport, program);
    } catch (err) {
      this.banner(`could not start session: ${(err as Error).message}`);
      return;
    }
    this.banner("");
    this.syncSlider();
  }

  private syncSlider(): void {
    const session = this.session!;
    this.el.slider.disabled = !session.sliderEnabled;
    this.el.slider.min = "0";
    this.el.slider.max = String(Math.max(session.stepCount - 1, 0));
    if (session.sliderEnabled) {
      this.el.slider.value = String(session.stepIndex);
      this.render(session.stepIndex);
    } else {
      this.el.stepLabel.textContent = "no steps";
    }
  }

  private render(index: number): void {
    const session = this.session;
    if (!session || !session.sliderEnabled) return;
    const model = buildPanes(session, index);
    this.el.stepLabel.textContent =
      `step ${index + 1}/${session.stepCount} (${model.transition})`;
    this.el.modeBadge.textContent = model.modeBadge ?? "";
    this.renderTree(model);
    this.renderExplanation(model);
    this.el.consolePane.textContent = model.console.join("\n");
    this.renderDispatch(model);
  }

  private renderTree(model: PaneModel): void {
    this.el.tree.replaceChildren(
      ...model.tree.map((box) => this.viewBox(box, model)));
    if (model.tree.length === 0) {
      this.el.tree.textContent = `root: ${JSON.stringify(model.root)}`;
    }
  }

  private viewBox(box: TreeBox, model: PaneModel): HTMLElement {
    const node = document.createElement("div");
    node.className = "view-box" + (box.orphaned ? " orphaned" : "");
    const changed = model.highlights?.changed[box.path] ?? [];
    if (changed.length > 0) node.classList.add("changed");
    const states = box.states
      .map((s) => `s${s.label} = ${JSON.stringify(s.val)} (queued ${s.queued})`)
      .join(", ");
    node.innerHTML =
      `<header>p${box.path} · ${box.componentName}` +
      `${box.orphaned ? " · orphaned" : ""}</header>` +
      `<div>dec {${box.dec.join(", ")}}</div>` +
      `<div>${states || "no state"}</div>` +
      `<div>effects queued: ${box.pendingEffects}</div>`;
    return node;
  }

  private renderExplanation(model: PaneModel): void {
    const items = model.explanation.map((rule) => {
      const li = document.createElement("li");
      const where = rule.path !== null ? ` @p${rule.path}` : "";
      li.textContent = `${rule.rule}${where}${rule.detail ? ` — ${rule.detail}` : ""}`;
      return li;
    });
    const list = document.createElement("ol");
    list.replaceChildren(...items);
    this.el.explanation.replaceChildren(list);
  }

  private renderDispatch(model: PaneModel): void {
    this.el.dispatchRow.replaceChildren();
    const session = this.session;
    if (!session || !session.live) return; // replay mode: dispatch disabled
    const live = session as LiveSession;
    if (live.mode !== "EventLoop") return;
    const snapshot = model.snapshot;
    const handlerCount = countHandlers(snapshot);
    for (let i = 0; i < handlerCount; i += 1) {
      const btn = document.createElement("button");
      btn.textContent = `dispatch ${i}`;
      btn.addEventListener("click", async () => {
        await live.dispatch(i);
        this.syncSlider();
      });
      this.el.dispatchRow.appendChild(btn);
    }
  }
}

/** Handlers are closure leaves reachable through the root, left to right. */
export function countHandlers(snapshot: {
  root: unknown;
  views: Record<string, { child: unknown }>;
}): number {
  let count = 0;
  const walk = (node: unknown): void => {
    if (Array.isArray(node)) {
      node.forEach(walk);
    } else if (node !== null && typeof node === "object") {
      const tagged = node as { kind?: string; path?: number };
      if (tagged.kind === "closure") count += 1;
      else if (tagged.kind === "path") walk(snapshot.views[String(tagged.path)]?.child);
    }
  };
  walk(snapshot.root);
  return count;
}

export function mount(doc: Document): App {
  const app = new App(doc);
  const input = doc.getElementById("trace-file") as HTMLInputElement | null;
  input?.addEventListener("change", async () => {
    const file = input.files?.[0];
    if (file) app.openTrace(await file.text());
  });
  return app;
}
