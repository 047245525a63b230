/**
 * SVG painting of the three stacked layers. Pure read of ViewState: call
 * again after every applied event. Pulse highlights fade via CSS classes;
 * their duration is cosmetic and carries no protocol meaning.
 */

import { classLayout, objectLayout, DiagramLayout } from "./layout.js";
import { ModelDoc, classNamed, formatValue, methodSignature } from "./model.js";
import { ViewState } from "./viewstate.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

function centers(layout: DiagramLayout): Map<string, { cx: number; cy: number; box: { x: number; y: number; w: number; h: number } }> {
  const out = new Map();
  for (const n of layout.nodes) {
    out.set(n.key, { cx: n.x + n.w / 2, cy: n.y + n.h / 2, box: n });
  }
  return out;
}

function drawEdges(svg: SVGSVGElement, layout: DiagramLayout) {
  const pos = centers(layout);
  for (const e of layout.edges) {
    const a = pos.get(e.from);
    const b = pos.get(e.to);
    if (!a || !b) continue;
    const line = el("line", {
      x1: String(a.cx),
      y1: String(a.box.y),
      x2: String(b.cx),
      y2: String(b.box.y + b.box.h),
      class: `edge edge-${e.kind}`,
    });
    if (e.kind === "generalization") line.setAttribute("marker-end", "url(#triangle)");
    svg.appendChild(line);
    if (e.label) {
      svg.appendChild(
        el(
          "text",
          {
            x: String((a.cx + b.cx) / 2),
            y: String((a.box.y + b.box.y + b.box.h) / 2 - 4),
            class: "edge-label",
          },
          e.label,
        ),
      );
    }
  }
}

function drawCompartmentBox(
  svg: SVGSVGElement,
  x: number,
  y: number,
  w: number,
  title: string,
  sections: string[][],
  cssClass: string,
) {
  const lineH = 16;
  const headerH = 26;
  const total = headerH + sections.reduce((n, s) => n + Math.max(1, s.length) * lineH, 0);
  svg.appendChild(
    el("rect", {
      x: String(x),
      y: String(y),
      width: String(w),
      height: String(total),
      class: cssClass,
      rx: "3",
    }),
  );
  svg.appendChild(
    el(
      "text",
      { x: String(x + w / 2), y: String(y + 17), class: "node-title" },
      title,
    ),
  );
  let cy = y + headerH;
  for (const section of sections) {
    svg.appendChild(
      el("line", {
        x1: String(x),
        y1: String(cy),
        x2: String(x + w),
        y2: String(cy),
        class: "compartment",
      }),
    );
    for (const line of section.length ? section : [""]) {
      cy += lineH;
      svg.appendChild(
        el("text", { x: String(x + 6), y: String(cy - 4), class: "member" }, line),
      );
    }
  }
}

export function renderClassLayer(svg: SVGSVGElement, model: ModelDoc, view: ViewState | null) {
  svg.replaceChildren(defs());
  const layout = classLayout(model);
  svg.setAttribute("viewBox", `0 0 ${Math.max(layout.width, 300)} ${Math.max(layout.height, 120)}`);
  drawEdges(svg, layout);
  for (const node of layout.nodes) {
    const c = classNamed(model, node.key)!;
    const pulsing = view?.highlight.classes.includes(node.key) ?? false;
    drawCompartmentBox(
      svg,
      node.x,
      node.y,
      node.w,
      c.name,
      [
        c.attributes.map((a) => `${a.name}: ${a.type}`),
        c.methods.map(methodSignature),
      ],
      pulsing ? "class-box pulse" : "class-box",
    );
  }
}

export function renderObjectLayer(svg: SVGSVGElement, view: ViewState) {
  svg.replaceChildren(defs());
  const layout = objectLayout(view);
  svg.setAttribute("viewBox", `0 0 ${Math.max(layout.width, 300)} ${Math.max(layout.height, 120)}`);
  drawEdges(svg, layout);
  for (const node of layout.nodes) {
    const id = Number(node.key.slice(1));
    const obj = view.objects.get(id)!;
    const pulsing = view.highlight.objects.includes(id);
    drawCompartmentBox(
      svg,
      node.x,
      node.y,
      node.w,
      `${obj.cls.toLowerCase()}${obj.id}: ${obj.cls}`,
      [
        Object.keys(obj.attrs)
          .sort()
          .map((k) => `${k} = ${formatValue(obj.attrs[k])}`),
        obj.methods,
      ],
      pulsing ? "object-box pulse" : "object-box",
    );
    // inter-diagram connector stub: points up toward the class layer
    svg.appendChild(
      el("line", {
        x1: String(node.x + node.w / 2),
        y1: String(node.y),
        x2: String(node.x + node.w / 2),
        y2: String(node.y - 14),
        class: "edge edge-connector",
      }),
    );
    svg.appendChild(
      el(
        "text",
        { x: String(node.x + node.w / 2 + 4), y: String(node.y - 4), class: "edge-label" },
        `⇡ ${obj.connectorTo}`,
      ),
    );
  }
}

export function renderSourcePanel(
  panel: HTMLElement,
  view: ViewState,
  bodyFor: (cls: string, method: string) => string | null,
) {
  const { cls, method, line } = view.source;
  panel.replaceChildren();
  const title = document.createElement("div");
  title.className = "source-title";
  title.textContent = cls && method ? `${cls}.${method}` : "(no method executing)";
  panel.appendChild(title);
  if (!cls || !method) return;
  const body = bodyFor(cls, method) ?? "// source not available";
  body.split("\n").forEach((text, i) => {
    const row = document.createElement("div");
    row.className = i + 1 === line ? "source-line current" : "source-line";
    const num = document.createElement("span");
    num.className = "line-no";
    num.textContent = String(i + 1).padStart(3, " ");
    row.appendChild(num);
    row.appendChild(document.createTextNode(" " + text));
    panel.appendChild(row);
    if (i + 1 === line) row.scrollIntoView({ block: "nearest" });
  });
}

function defs(): SVGDefsElement {
  const d = el("defs");
  const marker = el("marker", {
    id: "triangle",
    viewBox: "0 0 12 12",
    refX: "10",
    refY: "6",
    markerWidth: "10",
    markerHeight: "10",
    orient: "auto",
  });
  marker.appendChild(
    el("path", { d: "M 1 1 L 11 6 L 1 11 z", class: "triangle-marker" }),
  );
  d.appendChild(marker);
  return d;
}
