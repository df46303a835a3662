"""SVG export of learning curves and trajectory overlays.

Charts are written as plain SVG so they can be embedded in docs without a
plotting stack. Input type is detected from the CSV header: metrics files
become a single learning-curve polyline, trajectory files become one path per
UAV plus a dashed path per goal track.
"""

from __future__ import annotations

import csv

METRICS_HEADER = ["episode", "total_clipped_reward", "mean_loss", "epsilon"]
TRAJECTORY_HEADER = ["episode", "t", "uav_id", "x", "y", "gx", "gy", "reward"]

_PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]

_WIDTH = 720
_HEIGHT = 480
_MARGIN = 56


class PlotInputError(ValueError):
    """The input CSV is empty, headerless or has an unrecognized schema."""


def _read_rows(path) -> tuple[list[str], list[list[str]]]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        rows = [row for row in reader if row]
    if not rows:
        raise PlotInputError(f"no data in {path}")
    return rows[0], rows[1:]


def _spans(values, pad_frac=0.05):
    lo, hi = min(values), max(values)
    if hi == lo:
        hi = lo + 1.0
    pad = (hi - lo) * pad_frac
    return lo - pad, hi + pad


def _polyline(points, color, dashed=False, width=1.5) -> str:
    coords = " ".join(f"{px:.2f},{py:.2f}" for px, py in points)
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="{width}"'
        f'{dash} points="{coords}"/>'
    )


def _frame(title: str, body: list[str], x_label: str, y_label: str) -> str:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{_MARGIN}" y1="{_HEIGHT - _MARGIN}" x2="{_WIDTH - _MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="#333"/>',
        f'<line x1="{_MARGIN}" y1="{_MARGIN}" x2="{_MARGIN}" '
        f'y2="{_HEIGHT - _MARGIN}" stroke="#333"/>',
        f'<text x="{_WIDTH / 2:.0f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<text x="{_WIDTH / 2:.0f}" y="{_HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>',
        f'<text x="16" y="{_HEIGHT / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {_HEIGHT / 2:.0f})">{y_label}</text>',
    ]
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_learning_curve(episodes, values) -> str:
    x_lo, x_hi = _spans(episodes)
    y_lo, y_hi = _spans(values)

    def sx(v):
        return _MARGIN + (v - x_lo) / (x_hi - x_lo) * (_WIDTH - 2 * _MARGIN)

    def sy(v):
        return _HEIGHT - _MARGIN - (v - y_lo) / (y_hi - y_lo) * (_HEIGHT - 2 * _MARGIN)

    points = [(sx(e), sy(v)) for e, v in zip(episodes, values)]
    body = [_polyline(points, _PALETTE[0])]
    return _frame("total clipped reward per episode", body,
                  "episode", "total clipped reward")


def render_trajectories(rows) -> str:
    """rows: parsed trajectory records for a single episode."""
    by_uav: dict[int, dict[str, list]] = {}
    for r in rows:
        tracks = by_uav.setdefault(int(r["uav_id"]), {"xy": [], "goal": []})
        tracks["xy"].append((r["x"], r["y"]))
        tracks["goal"].append((r["gx"], r["gy"]))
    all_x = [p[0] for tr in by_uav.values() for key in ("xy", "goal") for p in tr[key]]
    all_y = [p[1] for tr in by_uav.values() for key in ("xy", "goal") for p in tr[key]]
    x_lo, x_hi = _spans(all_x)
    y_lo, y_hi = _spans(all_y)
    # uniform scale so shapes keep their aspect ratio
    scale = min((_WIDTH - 2 * _MARGIN) / (x_hi - x_lo), (_HEIGHT - 2 * _MARGIN) / (y_hi - y_lo))
    cx = (x_lo + x_hi) / 2
    cy = (y_lo + y_hi) / 2

    def sx(v):
        return _WIDTH / 2 + (v - cx) * scale

    def sy(v):
        return _HEIGHT / 2 - (v - cy) * scale

    body = []
    for uav_id in sorted(by_uav):
        color = _PALETTE[uav_id % len(_PALETTE)]
        body.append(_polyline([(sx(x), sy(y)) for x, y in by_uav[uav_id]["xy"]], color))
    for uav_id in sorted(by_uav):
        color = _PALETTE[uav_id % len(_PALETTE)]
        body.append(
            _polyline([(sx(x), sy(y)) for x, y in by_uav[uav_id]["goal"]], color, dashed=True)
        )
    return _frame("UAV trajectories (solid) and goal tracks (dashed)", body, "x", "y")


def export_plot_data(in_path, out_path) -> None:
    """Render a metrics or trajectory CSV to an SVG chart.

    Nothing is written unless the input parses; trajectory charts show the
    first episode present in the file.
    """
    header, data = _read_rows(in_path)
    if header == METRICS_HEADER:
        if not data:
            raise PlotInputError(f"no metric rows in {in_path}")
        episodes = [float(r[0]) for r in data]
        values = [float(r[1]) for r in data]
        svg = render_learning_curve(episodes, values)
    elif header == TRAJECTORY_HEADER:
        if not data:
            raise PlotInputError(f"no trajectory rows in {in_path}")
        first_episode = data[0][0]
        rows = [
            {
                "uav_id": int(r[2]),
                "x": float(r[3]),
                "y": float(r[4]),
                "gx": float(r[5]),
                "gy": float(r[6]),
            }
            for r in data
            if r[0] == first_episode
        ]
        svg = render_trajectories(rows)
    else:
        raise PlotInputError(f"unrecognized CSV header in {in_path}: {header}")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(svg)
