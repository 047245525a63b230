"""Static diagram rendering for the report path.

Draws the class diagram (boxes with attribute/method compartments,
generalization and association edges) and the final object diagram (one
node per live instance with its attribute values, one edge per link) to
PNG files.  Layout is deterministic: classes are layered by inheritance
depth and ordered by model position; instances form a grid in id order.
"""

from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import FancyArrowPatch

from .model import ClassModel
from .snapshot import Snapshot, link_sort_key
from .values import Handle, InstanceSet, type_name_of

_BOX_W = 2.6
_BOX_H_BASE = 0.55
_LINE_H = 0.28


def _class_label(model: ClassModel, name: str) -> List[str]:
    cdef = model.class_named(name)
    lines = [name, "—" * 8]
    for a in cdef.attributes:
        lines.append(f"{a.name}: {a.type}")
    lines.append("—" * 8)
    for m in cdef.methods:
        params = ", ".join(p for p, _ in m.params)
        marker = "$" if m.is_static else ""
        lines.append(f"{marker}{m.name}({params})")
    return lines


def _depth(model: ClassModel, name: str) -> int:
    return len(model.ancestry(name)) - 1


def _class_positions(model: ClassModel) -> Dict[str, Tuple[float, float]]:
    layers: Dict[int, List[str]] = {}
    for c in model.classes:
        layers.setdefault(_depth(model, c.name), []).append(c.name)
    positions: Dict[str, Tuple[float, float]] = {}
    for depth in sorted(layers):
        for i, name in enumerate(layers[depth]):
            positions[name] = (i * (_BOX_W + 1.2), -depth * 3.2)
    return positions


def _draw_box(ax, x, y, lines, face="#fdf6e3", edge="#333333"):
    height = _BOX_H_BASE + _LINE_H * len(lines)
    ax.add_patch(
        plt.Rectangle(
            (x, y - height), _BOX_W, height, facecolor=face, edgecolor=edge, linewidth=1.0
        )
    )
    for i, line in enumerate(lines):
        weight = "bold" if i == 0 else "normal"
        ax.text(
            x + _BOX_W / 2,
            y - 0.3 - _LINE_H * i,
            line,
            ha="center",
            va="center",
            fontsize=7,
            fontweight=weight,
            family="monospace",
        )
    return height


def render_class_diagram(model: ClassModel, out_path) -> None:
    positions = _class_positions(model)
    fig, ax = plt.subplots(figsize=(max(6, 2.2 * max(1, len(model.classes))), 6))
    heights: Dict[str, float] = {}
    for name, (x, y) in positions.items():
        heights[name] = _draw_box(ax, x, y, _class_label(model, name))

    for sub, sup in model.generalizations:
        if sub not in positions or sup not in positions:
            continue
        x1, y1 = positions[sub]
        x2, y2 = positions[sup]
        arrow = FancyArrowPatch(
            (x1 + _BOX_W / 2, y1),
            (x2 + _BOX_W / 2, y2 - heights[sup]),
            arrowstyle="-|>",
            mutation_scale=16,
            linewidth=1.0,
            color="#555555",
            fill=False,
        )
        ax.add_patch(arrow)
    for rel in model.relations:
        if rel.from_cls not in positions or rel.to_cls not in positions:
            continue
        x1, y1 = positions[rel.from_cls]
        x2, y2 = positions[rel.to_cls]
        style = "-" if rel.kind == "association" else "-"
        arrow = FancyArrowPatch(
            (x1 + _BOX_W, y1 - heights[rel.from_cls] / 2),
            (x2, y2 - heights[rel.to_cls] / 2),
            arrowstyle=style,
            linestyle="--" if rel.kind == "composition" else "-",
            mutation_scale=10,
            linewidth=1.0,
            color="#2266aa",
        )
        ax.add_patch(arrow)
        ax.text(
            (x1 + _BOX_W + x2) / 2,
            (y1 - heights[rel.from_cls] / 2 + y2 - heights[rel.to_cls] / 2) / 2 + 0.12,
            f"{rel.id} {rel.from_mult}→{rel.to_mult}",
            fontsize=7,
            ha="center",
            color="#2266aa",
        )

    ax.relim()
    ax.autoscale_view()
    ax.set_axis_off()
    ax.set_title("class diagram", fontsize=10)
    fig.tight_layout()
    fig.savefig(Path(out_path), dpi=130)
    plt.close(fig)


def _value_text(v) -> str:
    if isinstance(v, Handle):
        return f"→#{v.id}" if v.id is not None else "none"
    if isinstance(v, InstanceSet):
        return "{" + ",".join(f"#{i}" for i in v.ids) + "}"
    if isinstance(v, str):
        return repr(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def render_object_diagram(model: ClassModel, snapshot: Snapshot, out_path) -> None:
    instances = sorted(snapshot.instances, key=lambda i: i.id)
    fig, ax = plt.subplots(figsize=(max(6, 2.2 * max(1, len(instances))), 6))
    positions: Dict[int, Tuple[float, float]] = {}
    per_row = max(1, int(len(instances) ** 0.5 + 0.999))
    heights: Dict[int, float] = {}
    for idx, inst in enumerate(instances):
        x = (idx % per_row) * (_BOX_W + 1.4)
        y = -(idx // per_row) * 3.6
        positions[inst.id] = (x, y)
        lines = [f"{inst.cls.lower()}{inst.id}: {inst.cls}", "—" * 8]
        for name in sorted(inst.attrs):
            lines.append(f"{name} = {_value_text(inst.attrs[name])}")
        heights[inst.id] = _draw_box(ax, x, y, lines, face="#e3f2fd")

    for rel, a, b in sorted(snapshot.links, key=link_sort_key):
        if a not in positions or b not in positions:
            continue
        x1, y1 = positions[a]
        x2, y2 = positions[b]
        arrow = FancyArrowPatch(
            (x1 + _BOX_W, y1 - heights[a] / 2),
            (x2, y2 - heights[b] / 2),
            arrowstyle="-",
            mutation_scale=10,
            linewidth=1.0,
            color="#aa4422",
            connectionstyle="arc3,rad=0.15",
        )
        ax.add_patch(arrow)
        ax.text(
            (x1 + _BOX_W + x2) / 2,
            (y1 - heights[a] / 2 + y2 - heights[b] / 2) / 2 + 0.1,
            rel,
            fontsize=7,
            ha="center",
            color="#aa4422",
        )

    if not instances:
        ax.text(0.5, 0.5, "no live instances", ha="center", va="center", fontsize=10)
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1)
    else:
        ax.relim()
        ax.autoscale_view()
        fig.tight_layout()
    ax.set_axis_off()
    ax.set_title(f"object diagram ({snapshot.status})", fontsize=10)
    fig.savefig(Path(out_path), dpi=130)
    plt.close(fig)
