"""SVG snapshots of a world (2 px per cm, y axis pointing up)."""

from __future__ import annotations

import math
from pathlib import Path

from swarmagg.world import World

PX_PER_CM = 2.0
# one colour per group, cycled past ten groups
GROUP_COLORS = (
    "#e41a1c",
    "#377eb8",
    "#4daf4a",
    "#984ea3",
    "#ff7f00",
    "#a65628",
    "#f781bf",
    "#999999",
    "#17becf",
    "#bcbd22",
)


def group_color(k: int) -> str:
    return GROUP_COLORS[k % len(GROUP_COLORS)]


def _n(v: float) -> str:
    return f"{v:.2f}"


def svg_text(world: World, title: str | None = None) -> str:
    side = world.arena.side
    size = side * PX_PER_CM

    def sx(x):
        return x * PX_PER_CM

    def sy(y):
        return (side - y) * PX_PER_CM

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_n(size)}" height="{_n(size)}" '
        f'viewBox="0 0 {_n(size)} {_n(size)}">',
    ]
    if title:
        parts.append(f"<title>{title}</title>")
    parts.append(
        f'<rect class="arena" x="0.00" y="0.00" width="{_n(size)}" height="{_n(size)}" '
        'fill="white" stroke="black" stroke-width="2"/>'
    )
    for g, (x, y) in zip(world.bollard_groups, world.bollard_positions):
        parts.append(
            f'<circle class="bollard" cx="{_n(sx(x))}" cy="{_n(sy(y))}" r="{_n(world.bollard_radius * PX_PER_CM)}" '
            f'fill="none" stroke="{group_color(int(g))}" stroke-width="2"/>'
        )
    r_px = world.robot_radius * PX_PER_CM
    for g, (x, y), th in zip(world.groups, world.positions, world.orientations):
        color = group_color(int(g))
        tip_x = x + world.robot_radius * math.cos(th)
        tip_y = y + world.robot_radius * math.sin(th)
        parts.append(f'<circle class="robot" cx="{_n(sx(x))}" cy="{_n(sy(y))}" r="{_n(r_px)}" fill="{color}"/>')
        parts.append(
            f'<line class="heading" x1="{_n(sx(x))}" y1="{_n(sy(y))}" x2="{_n(sx(tip_x))}" y2="{_n(sy(tip_y))}" '
            'stroke="black" stroke-width="1"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_snapshot(world: World, out, title: str | None = None) -> Path:
    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(svg_text(world, title))
    return out
