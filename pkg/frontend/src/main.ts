/**
 * Page wiring: connect to the stepping service over WebSocket, drive it
 * with the controls, and render every pushed event — or replay a local
 * trace.jsonl file offline against the same fold.
 */

import { ModelDoc } from "./model.js";
import { StepClient, Transport, parseTraceFile } from "./protocol.js";
import { renderClassLayer, renderObjectLayer, renderSourcePanel } from "./render.js";
import { ViewState, applyEvent, createViewState, replayTrace } from "./viewstate.js";

const $ = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

let client: StepClient | null = null;
let model: ModelDoc | null = null;
let view: ViewState | null = null;

function setBanner(text: string, isError = false) {
  const banner = $("banner");
  banner.textContent = text;
  banner.className = isError ? "banner error" : "banner";
}

function refresh() {
  if (!model) return;
  renderClassLayer($("class-layer") as unknown as SVGSVGElement, model, view);
  if (view) {
    renderObjectLayer($("object-layer") as unknown as SVGSVGElement, view);
    renderSourcePanel($("source-panel"), view, () => null);
    $("warnings").textContent = view.warnings.slice(-3).join("\n");
  }
  updateControls();
}

function updateControls() {
  const state = view?.control ?? "idle";
  const connected = client !== null;
  ($("btn-start") as HTMLButtonElement).disabled = !connected || state === "running";
  for (const id of ["btn-step", "btn-continue"]) {
    ($(id) as HTMLButtonElement).disabled =
      !connected || !(state === "ready" || state === "paused" || state === "running");
  }
  ($("btn-pause") as HTMLButtonElement).disabled = !connected || state !== "running";
  ($("btn-stop") as HTMLButtonElement).disabled = !connected || state === "idle";
  $("status").textContent = state;
}

function fillEntryPicker(doc: ModelDoc) {
  const picker = $("entry") as HTMLSelectElement;
  picker.replaceChildren();
  // only methods with at least one command can start an execution
  for (const entry of doc.entryPoints ?? []) {
    const option = document.createElement("option");
    option.value = entry;
    option.textContent = entry;
    picker.appendChild(option);
  }
}

function connect() {
  const url = ($("endpoint") as HTMLInputElement).value;
  const socket = new WebSocket(url);
  const transport: Transport = {
    send: (frame) => socket.send(frame),
    close: () => socket.close(),
  };
  const stepClient = new StepClient(transport, {
    onModel: (doc) => {
      model = doc;
      view = createViewState(doc);
      fillEntryPicker(doc);
      setBanner(`connected; ${doc.classes.length} classes`);
      refresh();
    },
    onEvent: (event) => {
      if (view) {
        applyEvent(view, event);
        refresh();
      }
    },
    onReply: (reply) => {
      if (!reply.ok && reply.error) {
        setBanner(`${reply.error.kind}: ${reply.error.message}`, true);
      }
      updateControls();
    },
  });
  socket.onopen = () => {
    client = stepClient;
    stepClient.requestModel();
  };
  socket.onmessage = (msg) => stepClient.receive(String(msg.data));
  socket.onclose = () => {
    client = null;
    setBanner("disconnected — connect again or load a trace file", true);
    updateControls();
  };
  socket.onerror = () => setBanner("connection failed", true);
}

function wireControls() {
  $("btn-connect").onclick = connect;
  $("btn-start").onclick = () => {
    if (!client || !model) return;
    view = createViewState(model);
    client.start(($("entry") as HTMLSelectElement).value);
    refresh();
  };
  $("btn-step").onclick = () => client?.step();
  $("btn-continue").onclick = () => client?.continue_();
  $("btn-pause").onclick = () => client?.pause();
  $("btn-stop").onclick = () => client?.stop();

  ($("trace-file") as HTMLInputElement).onchange = async (ev) => {
    const input = ev.target as HTMLInputElement;
    const traceFile = input.files?.[0];
    if (!traceFile || !model) {
      setBanner("load a model first (connect, or choose a model file)", true);
      return;
    }
    const events = parseTraceFile(await traceFile.text());
    view = replayTrace(model, events);
    setBanner(`replayed ${events.length} events offline`);
    refresh();
  };
  ($("model-file") as HTMLInputElement).onchange = async (ev) => {
    const input = ev.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    model = JSON.parse(await file.text()) as ModelDoc;
    view = createViewState(model);
    fillEntryPicker(model);
    setBanner(`model loaded: ${model.classes.length} classes`);
    refresh();
  };
}

wireControls();
updateControls();
setBanner("connect to a stepping service, or load model + trace files for offline replay");
