/**
 * UI sessions.  A replay session indexes a loaded trace file; a live
 * session drives an engine over the request/reply protocol and keeps the
 * accumulated step records, from which a trace file can be exported
 * byte-identically to one the engine writes itself.
 */

import {
  SessionReply, SessionRequest, Snapshot, StepRecord, TraceFile, Transport,
  parseTraceFile, stableStringify,
} from "./protocol";

export const DEFAULT_BUDGETS = { retry_limit: 25, rerender_limit: 100 };

export abstract class UiSession {
  steps: StepRecord[] = [];
  stepIndex = -1; // -1 while no step exists; otherwise [0, steps.length)

  abstract readonly live: boolean;
  abstract readonly program: string;

  get stepCount(): number {
    return this.steps.length;
  }

  get sliderEnabled(): boolean {
    return this.steps.length > 0;
  }

  seek(index: number): StepRecord {
    if (index < 0 || index >= this.steps.length) {
      throw new Error(`step index ${index} out of range [0, ${this.steps.length})`);
    }
    this.stepIndex = index;
    return this.steps[index];
  }

  snapshotAt(index: number): Snapshot {
    const step = this.steps[index];
    if (!step || !step.snapshot) throw new Error(`no snapshot at step ${index}`);
    return step.snapshot;
  }

  /** Console lines accumulated through the given step, inclusive. */
  consoleThrough(index: number): string[] {
    return this.steps.slice(0, index + 1).flatMap((s) => s.console);
  }
}

export class ReplaySession extends UiSession {
  readonly live = false;
  readonly trace: TraceFile;

  constructor(trace: TraceFile) {
    super();
    this.trace = trace;
    this.steps = trace.steps;
    this.stepIndex = this.steps.length - 1;
  }

  get program(): string {
    return this.trace.program;
  }
}

export class LiveSession extends UiSession {
  readonly live = true;
  readonly program: string;
  readonly budgets: Record<string, number>;
  private readonly transport: Transport;
  lastError: string | null = null;
  mode: string | null = null;

  constructor(transport: Transport, program: string,
              budgets: Record<string, number> = DEFAULT_BUDGETS) {
    super();
    this.transport = transport;
    this.program = program;
    this.budgets = budgets;
  }

  private absorb(reply: SessionReply): SessionReply {
    this.steps = this.steps.concat(reply.steps);
    if (this.steps.length > 0) this.stepIndex = this.steps.length - 1;
    this.mode = reply.mode;
    this.lastError = reply.error ?? null;
    return reply;
  }

  private async send(req: SessionRequest): Promise<SessionReply> {
    return this.absorb(await this.transport.request(req));
  }

  async start(): Promise<void> {
    const loaded = await this.transport.request({ cmd: "load", program: this.program });
    if (!loaded.ok) throw new Error(loaded.error ?? "load failed");
    await this.send({ cmd: "run_until_idle" });
  }

  async step(): Promise<SessionReply> {
    return this.send({ cmd: "step" });
  }

  async runUntilIdle(): Promise<SessionReply> {
    return this.send({ cmd: "run_until_idle" });
  }

  /** Deliver a click and run to idle; the slider lands on the last step. */
  async dispatch(handler: number): Promise<SessionReply> {
    if (this.mode !== "EventLoop") {
      throw new Error(`dispatch needs EventLoop mode, engine is in ${this.mode}`);
    }
    const reply = await this.send({ cmd: "event", handler });
    if (!reply.ok) return reply;
    return this.send({ cmd: "run_until_idle" });
  }

  exportTrace(): TraceFile {
    const outcome: Record<string, unknown> =
      this.lastError !== null
        ? { error: { kind: this.lastError } }
        : { idle: this.mode === "EventLoop" };
    return {
      format: 1,
      program: this.program,
      budgets: this.budgets,
      steps: this.steps,
      outcome,
    };
  }

  exportBytes(): string {
    return stableStringify(this.exportTrace());
  }

  close(): void {
    this.transport.close();
  }
}

export function loadTrace(data: string | TraceFile): ReplaySession {
  const trace = typeof data === "string" ? parseTraceFile(data) : data;
  return new ReplaySession(trace);
}

export async function loadLive(transport: Transport, program: string,
                               budgets?: Record<string, number>): Promise<LiveSession> {
  const session = new LiveSession(transport, program, budgets);
  await session.start();
  return session;
}
