import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { ModelDoc } from "../src/model.js";
import { TraceEvent, parseTraceFile } from "../src/protocol.js";
import {
  applyEvent,
  createViewState,
  replayTrace,
  viewSummary,
} from "../src/viewstate.js";

const FIXTURES = join(__dirname, "fixtures");

const model = JSON.parse(
  readFileSync(join(FIXTURES, "observer.model.json"), "utf-8"),
) as ModelDoc;
const trace = parseTraceFile(
  readFileSync(join(FIXTURES, "observer.trace.jsonl"), "utf-8"),
);
const snapshot = JSON.parse(
  readFileSync(join(FIXTURES, "observer.snapshot.json"), "utf-8"),
);

describe("offline replay of the recorded observer trace", () => {
  const view = replayTrace(model, trace);

  it("reaches the finished control state with no warnings", () => {
    expect(view.control).toBe("finished");
    expect(view.warnings).toEqual([]);
  });

  it("object layer holds exactly the snapshot instances", () => {
    const nodes = [...view.objects.values()].sort((a, b) => a.id - b.id);
    expect(nodes.map((n) => ({ id: n.id, cls: n.cls }))).toEqual(
      snapshot.instances.map((i: { id: number; class: string }) => ({
        id: i.id,
        cls: i.class,
      })),
    );
  });

  it("object attribute values equal the snapshot attrs", () => {
    for (const inst of snapshot.instances) {
      const node = view.objects.get(inst.id)!;
      expect(node.attrs).toEqual(inst.attrs);
    }
  });

  it("object links equal the snapshot links", () => {
    const got = [...view.links].sort((x, y) => x.a - y.a || x.b - y.b);
    expect(got).toEqual(
      snapshot.links.map((l: { rel: string; a: number; b: number }) => ({
        rel: l.rel,
        a: l.a,
        b: l.b,
      })),
    );
  });

  it("each object node lists the methods the instance possesses", () => {
    const subject = [...view.objects.values()].find((o) => o.cls === "Subject")!;
    expect(subject.methods).toEqual([
      "Attach(o)",
      "NotifyAll(msg)",
      "CountObservers()",
    ]);
    const observer = [...view.objects.values()].find((o) => o.cls === "Observer")!;
    expect(observer.methods).toEqual(["Receive(m)"]);
  });

  it("each object node carries an inter-diagram connector to its class", () => {
    for (const node of view.objects.values()) {
      expect(node.connectorTo).toBe(node.cls);
    }
  });

  it("replay is pure: folding the same stream twice gives identical views", () => {
    const again = replayTrace(model, trace);
    expect(viewSummary(again)).toEqual(viewSummary(view));
  });
});

describe("event folding invariants", () => {
  it("node count always equals the live-instance count of the prefix", () => {
    const view = createViewState(model);
    let live = 0;
    for (const event of trace) {
      applyEvent(view, event);
      if (event.type === "instance_created") live++;
      if (event.type === "instance_deleted") live--;
      expect(view.objects.size).toBe(live);
    }
  });

  it("at most one current source line is highlighted", () => {
    const view = createViewState(model);
    for (const event of trace) {
      applyEvent(view, event);
      // the panel is a single (cls, method, line) cell by construction
      if (view.source.line !== null) {
        expect(typeof view.source.line).toBe("number");
      }
    }
  });

  it("command events move the source panel to the executing method", () => {
    const view = createViewState(model);
    for (const event of trace) {
      applyEvent(view, event);
      if (event.type === "command") {
        expect(view.source.cls).toBe(event.class);
        expect(view.source.method).toBe(event.method);
        expect(view.source.line).toBe(event.line);
      }
    }
  });

  it("method_call pulses the owning class and callee object", () => {
    const view = createViewState(model);
    for (const event of trace) {
      applyEvent(view, event);
      if (event.type === "method_call") {
        expect(view.highlight.classes).toEqual([event.class]);
        if (event.callee_id !== null) {
          expect(view.highlight.objects).toEqual([event.callee_id]);
        }
      }
    }
    expect(view.highlight.classes).toEqual([]); // cleared on run_finished
  });

  it("unknown-instance events warn instead of crashing", () => {
    const view = createViewState(model);
    const bogus: TraceEvent = {
      seq: 1,
      type: "attribute_set",
      id: 99,
      attr: "x",
      value: { t: "int", v: 1 },
    };
    expect(() => applyEvent(view, bogus)).not.toThrow();
    expect(view.warnings.some((w) => w.includes("unknown instance 99"))).toBe(true);
  });

  it("attribute defaults come from the model on instance_created", () => {
    const view = createViewState(model);
    applyEvent(view, { seq: 1, type: "instance_created", class: "Observer", id: 1 });
    expect(view.objects.get(1)!.attrs).toEqual({
      last_msg: { t: "str", v: "" },
      count: { t: "int", v: 0 },
    });
  });

  it("error events mark the run failed", () => {
    const view = createViewState(model);
    applyEvent(view, {
      seq: 1,
      type: "error",
      kind: "division-by-zero",
      line: 3,
      message: "division by zero",
    });
    expect(view.control).toBe("failed");
  });
});
