/**
 * The rendering state and its one source of truth: the event fold.
 *
 * The object layer is exactly the fold of received state-change events
 * over the empty state — replaying a recorded trace and stepping live
 * over the service produce the same view by construction. Each object
 * node lists the methods the instance possesses and keeps an
 * inter-diagram connector to its class node in the class layer.
 */

import {
  ModelDoc,
  TaggedValue,
  allAttributes,
  allMethods,
  defaultValue,
  methodSignature,
} from "./model.js";
import { TraceEvent } from "./protocol.js";

export interface ObjectNode {
  id: number;
  cls: string;
  attrs: Record<string, TaggedValue>;
  /** Method signatures this instance possesses (own + inherited). */
  methods: string[];
  /** Inter-diagram connector target: the class-layer node name. */
  connectorTo: string;
}

export interface LinkEdge {
  rel: string;
  a: number;
  b: number;
}

export interface SourcePanel {
  cls: string | null;
  method: string | null;
  /** 1-based current command line; at most one line highlighted. */
  line: number | null;
}

export interface PulseHighlight {
  classes: string[];
  objects: number[];
}

export type ControlState =
  | "idle"
  | "ready"
  | "running"
  | "paused"
  | "finished"
  | "failed";

export interface ViewState {
  model: ModelDoc;
  objects: Map<number, ObjectNode>;
  links: LinkEdge[];
  source: SourcePanel;
  highlight: PulseHighlight;
  control: ControlState;
  warnings: string[];
  returnValue: TaggedValue | null;
}

export function createViewState(model: ModelDoc): ViewState {
  return {
    model,
    objects: new Map(),
    links: [],
    source: { cls: null, method: null, line: null },
    highlight: { classes: [], objects: [] },
    control: "idle",
    warnings: [],
    returnValue: null,
  };
}

function liveOrWarn(state: ViewState, id: unknown, context: string): ObjectNode | null {
  if (typeof id !== "number") return null;
  const node = state.objects.get(id);
  if (!node) {
    state.warnings.push(`${context} references unknown instance ${id}`);
    return null;
  }
  return node;
}

/** Fold one trace event into the view. Never throws on bad events. */
export function applyEvent(state: ViewState, event: TraceEvent): ViewState {
  switch (event.type) {
    case "run_started": {
      state.control = "ready";
      break;
    }
    case "instance_created": {
      const id = event.id as number;
      const cls = event.class as string;
      const attrs: Record<string, TaggedValue> = {};
      for (const a of allAttributes(state.model, cls)) {
        attrs[a.name] = defaultValue(state.model, a.type);
      }
      state.objects.set(id, {
        id,
        cls,
        attrs,
        methods: allMethods(state.model, cls).map(methodSignature),
        connectorTo: cls,
      });
      break;
    }
    case "instance_deleted": {
      const id = event.id as number;
      if (!state.objects.delete(id)) {
        state.warnings.push(`instance_deleted references unknown instance ${id}`);
      }
      state.highlight.objects = state.highlight.objects.filter((o) => o !== id);
      break;
    }
    case "attribute_set": {
      const node = liveOrWarn(state, event.id, "attribute_set");
      if (node) node.attrs[event.attr as string] = event.value as TaggedValue;
      break;
    }
    case "link_created": {
      const a = event.a as number;
      const b = event.b as number;
      const rel = event.rel as string;
      liveOrWarn(state, a, "link_created");
      liveOrWarn(state, b, "link_created");
      if (!state.links.some((l) => l.rel === rel && l.a === a && l.b === b)) {
        state.links.push({ rel, a, b });
      }
      break;
    }
    case "link_removed": {
      const a = event.a as number;
      const b = event.b as number;
      const rel = event.rel as string;
      state.links = state.links.filter(
        (l) => !(l.rel === rel && l.a === a && l.b === b),
      );
      break;
    }
    case "method_call": {
      state.control = "running";
      // highlight the owning class, and the receiver when non-static
      state.highlight = { classes: [event.class as string], objects: [] };
      if (event.callee_id !== null && typeof event.callee_id === "number") {
        liveOrWarn(state, event.callee_id, "method_call");
        state.highlight.objects = [event.callee_id];
      }
      break;
    }
    case "method_return": {
      state.returnValue = (event.value ?? null) as TaggedValue | null;
      break;
    }
    case "command": {
      state.control = "running";
      state.source = {
        cls: event.class as string,
        method: event.method as string,
        line: event.line as number,
      };
      break;
    }
    case "error": {
      state.control = "failed";
      state.warnings.push(
        `run failed: ${event.kind as string}: ${event.message as string}`,
      );
      break;
    }
    case "run_finished": {
      state.control = "finished";
      state.highlight = { classes: [], objects: [] };
      break;
    }
    default:
      state.warnings.push(`unknown event type ${event.type}`);
  }
  return state;
}

/** Fold a whole recorded trace over a fresh view (offline replay). */
export function replayTrace(model: ModelDoc, events: TraceEvent[]): ViewState {
  const state = createViewState(model);
  for (const event of events) applyEvent(state, event);
  return state;
}

/**
 * Canonical plain-object form for comparisons: two views with the same
 * summary render identically.
 */
export function viewSummary(state: ViewState) {
  return {
    objects: [...state.objects.values()]
      .sort((x, y) => x.id - y.id)
      .map((o) => ({
        id: o.id,
        cls: o.cls,
        attrs: Object.fromEntries(
          Object.keys(o.attrs)
            .sort()
            .map((k) => [k, o.attrs[k]]),
        ),
        methods: [...o.methods],
        connectorTo: o.connectorTo,
      })),
    links: [...state.links].sort(
      (x, y) =>
        parseInt(x.rel.slice(1)) - parseInt(y.rel.slice(1)) || x.a - y.a || x.b - y.b,
    ),
    source: { ...state.source },
    control: state.control,
    returnValue: state.returnValue,
  };
}
