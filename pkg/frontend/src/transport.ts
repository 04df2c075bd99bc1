/**
 * Node transport: spawns the engine's `serve` subcommand and speaks the
 * newline-delimited protocol over its standard streams.  Browsers use the
 * same interface over whatever bridge hosts the engine.
 */

import { spawn, ChildProcessByStdio } from "node:child_process";
import type { Readable, Writable } from "node:stream";

import { SessionReply, SessionRequest, Transport } from "./protocol";

export class StdioTransport implements Transport {
  private proc: ChildProcessByStdio<Writable, Readable, null>;
  private buffer = "";
  private waiting: Array<(reply: SessionReply) => void> = [];
  private queue: Promise<unknown> = Promise.resolve();

  constructor(command = "python3", args: string[] = ["-m", "minireact.cli", "serve"]) {
    this.proc = spawn(command, args, { stdio: ["pipe", "pipe", "inherit"] });
    this.proc.stdout.setEncoding("utf-8");
    this.proc.stdout.on("data", (chunk: string) => {
      this.buffer += chunk;
      let newline = this.buffer.indexOf("\n");
      while (newline >= 0) {
        const line = this.buffer.slice(0, newline);
        this.buffer = this.buffer.slice(newline + 1);
        const resolve = this.waiting.shift();
        if (resolve) resolve(JSON.parse(line) as SessionReply);
        newline = this.buffer.indexOf("\n");
      }
    });
  }

  /** Requests are serialized: one in flight at a time, replies in order. */
  request(req: SessionRequest): Promise<SessionReply> {
    const next = this.queue.then(
      () =>
        new Promise<SessionReply>((resolve) => {
          this.waiting.push(resolve);
          this.proc.stdin.write(JSON.stringify(req) + "\n");
        })
    );
    this.queue = next.catch(() => undefined);
    return next;
  }

  close(): void {
    this.proc.stdin.end();
    this.proc.kill();
  }
}
