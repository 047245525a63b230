import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { ModelDoc } from "../src/model.js";
import { Reply, StepClient, TraceEvent, Transport, parseTraceFile } from "../src/protocol.js";
import { createViewState, applyEvent, replayTrace, viewSummary } from "../src/viewstate.js";

const FIXTURES = join(__dirname, "fixtures");

const model = JSON.parse(
  readFileSync(join(FIXTURES, "observer.model.json"), "utf-8"),
) as ModelDoc;
const trace = parseTraceFile(
  readFileSync(join(FIXTURES, "observer.trace.jsonl"), "utf-8"),
);

/** Recorded server->client lines of a real stdio session. */
const transcript = readFileSync(join(FIXTURES, "observer.stdio.jsonl"), "utf-8")
  .split("\n")
  .filter((line) => line.trim().length > 0);

/**
 * Replays the recorded session: requests are swallowed (the transcript
 * already contains the answers); the test feeds server lines back in
 * protocol-faithful chunks keyed by request order.
 */
class TranscriptTransport implements Transport {
  sent: string[] = [];
  constructor(private deliver: (frame: string) => void) {}

  private cursor = 0;

  send(frame: string): void {
    this.sent.push(frame);
    const request = JSON.parse(frame) as { id: number; cmd: string };
    // deliver everything up to and including this request's reply
    while (this.cursor < transcript.length) {
      const line = transcript[this.cursor++];
      this.deliver(line);
      const obj = JSON.parse(line) as { id?: number; event?: unknown };
      if (obj.id === request.id) break;
    }
    // the start acknowledgement precedes its pushed prologue events
    if (request.cmd === "start") {
      while (
        this.cursor < transcript.length &&
        transcript[this.cursor].startsWith('{"event":')
      ) {
        this.deliver(transcript[this.cursor++]);
      }
    }
  }

  close(): void {}
}

describe("step client over a recorded live session", () => {
  it("live stepping produces the same final view as offline replay", () => {
    const view = createViewState(model);
    const received: TraceEvent[] = [];
    let modelSeen: ModelDoc | null = null;
    const transport = new TranscriptTransport((frame) => client.receive(frame));
    const client: StepClient = new StepClient(transport, {
      onModel: (doc) => {
        modelSeen = doc;
      },
      onEvent: (event) => {
        received.push(event);
        applyEvent(view, event);
      },
    });

    client.requestModel();
    client.start("Main.Run");
    client.continue_();
    client.requestState();
    client.stop();

    expect(modelSeen).not.toBeNull();
    expect(received.length).toBe(trace.length);
    const offline = replayTrace(model, trace);
    expect(viewSummary(view)).toEqual(viewSummary(offline));
  });

  it("every request id receives exactly one reply", () => {
    const transport = new TranscriptTransport((frame) => client.receive(frame));
    const client: StepClient = new StepClient(transport, {});
    client.requestModel();
    client.start("Main.Run");
    client.continue_();
    client.requestState();
    client.stop();
    expect(client.outstanding()).toEqual([]);
    const ids = client.replies.map((r: Reply) => r.id);
    expect(ids).toEqual([1, 2, 3, 4, 5]);
  });

  it("the streamed events equal the batch trace line for line", () => {
    const received: TraceEvent[] = [];
    const transport = new TranscriptTransport((frame) => client.receive(frame));
    const client: StepClient = new StepClient(transport, {
      onEvent: (e) => received.push(e),
    });
    client.requestModel();
    client.start("Main.Run");
    client.continue_();
    client.requestState();
    client.stop();
    expect(received).toEqual(trace);
  });

  it("the model reply names startable entry points without empty bodies", () => {
    let doc: ModelDoc | null = null;
    const transport = new TranscriptTransport((frame) => client.receive(frame));
    const client: StepClient = new StepClient(transport, {
      onModel: (d) => {
        doc = d;
      },
    });
    client.requestModel();
    const entries = doc!.entryPoints!;
    expect(entries).toContain("Main.Run");
    expect(entries).not.toContain("Main.Idle"); // empty body: not startable
  });

  it("tolerates malformed frames without crashing", () => {
    const errors: string[] = [];
    const client = new StepClient(
      { send: () => {}, close: () => {} },
      { onProtocolError: (m) => errors.push(m) },
    );
    client.receive("not json at all");
    client.receive('{"event":{"seq":1,"type":"run_started","args":[],"entry":"A.B"}}');
    expect(errors.length).toBe(1);
  });
});
