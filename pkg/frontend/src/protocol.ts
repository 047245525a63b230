/**
 * Wire protocol of the stepping service: single-line JSON frames.
 *
 * Requests carry an id and a cmd; every request receives exactly one
 * reply echoing its id. Trace events arrive as separate `{"event":...}`
 * frames, byte-identical to the batch trace lines. The client is
 * transport-agnostic so tests can drive it from recorded transcripts.
 */

import { ModelDoc, TaggedValue } from "./model.js";

export interface TraceEvent {
  seq: number;
  type: string;
  [key: string]: unknown;
}

export interface ErrorInfo {
  kind: string;
  message: string;
}

export interface Reply {
  id: number | null;
  ok: boolean;
  data?: unknown;
  error?: ErrorInfo;
}

export type Command =
  | { cmd: "start"; entry: string; args?: TaggedValue[] }
  | { cmd: "step" }
  | { cmd: "continue" }
  | { cmd: "pause" }
  | { cmd: "state" }
  | { cmd: "model" }
  | { cmd: "stop" };

/** Anything that moves frames: a WebSocket, or a test transcript. */
export interface Transport {
  send(frame: string): void;
  close(): void;
}

export interface ClientHandlers {
  onEvent?(event: TraceEvent): void;
  onModel?(model: ModelDoc): void;
  onReply?(reply: Reply): void;
  onProtocolError?(message: string): void;
}

export class StepClient {
  private nextId = 1;
  private pending = new Map<number, string>();
  readonly replies: Reply[] = [];

  constructor(private transport: Transport, private handlers: ClientHandlers = {}) {}

  /** Feed one incoming frame (the transport calls this). */
  receive(frame: string): void {
    let obj: Record<string, unknown>;
    try {
      obj = JSON.parse(frame) as Record<string, unknown>;
    } catch {
      this.handlers.onProtocolError?.(`unparseable frame: ${frame.slice(0, 80)}`);
      return;
    }
    if (obj && typeof obj === "object" && "event" in obj) {
      this.handlers.onEvent?.(obj.event as TraceEvent);
      return;
    }
    const reply = obj as unknown as Reply;
    if (typeof reply.id === "number") {
      const kind = this.pending.get(reply.id);
      this.pending.delete(reply.id);
      if (kind === "model" && reply.ok) {
        this.handlers.onModel?.(reply.data as ModelDoc);
      }
    }
    this.replies.push(reply);
    this.handlers.onReply?.(reply);
  }

  private issue(command: Command): number {
    const id = this.nextId++;
    this.pending.set(id, command.cmd);
    this.transport.send(JSON.stringify({ id, ...command }));
    return id;
  }

  requestModel(): number {
    return this.issue({ cmd: "model" });
  }

  start(entry: string, args: TaggedValue[] = []): number {
    return this.issue({ cmd: "start", entry, args });
  }

  step(): number {
    return this.issue({ cmd: "step" });
  }

  continue_(): number {
    return this.issue({ cmd: "continue" });
  }

  pause(): number {
    return this.issue({ cmd: "pause" });
  }

  requestState(): number {
    return this.issue({ cmd: "state" });
  }

  stop(): number {
    return this.issue({ cmd: "stop" });
  }

  /** Ids with no reply yet; empty when the request/reply pairing holds. */
  outstanding(): number[] {
    return [...this.pending.keys()];
  }
}

/** Parse a JSONL trace file (offline replay input). */
export function parseTraceFile(text: string): TraceEvent[] {
  return text
    .split("\n")
    .filter((line) => line.trim().length > 0)
    .map((line) => JSON.parse(line) as TraceEvent);
}
