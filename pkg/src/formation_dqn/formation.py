"""Time-varying formation specifications and goal trajectories.

A formation assigns every UAV index a goal position for each instant t >= 0.
Training draws from three randomized families (Lissajous curves, translating
regular polygons, fixed offsets); the held-out test set is a figure-eight
lemniscate and a five-pointed star traversed at constant speed. The star's
corner turns would need unbounded acceleration, so exact tracking of it is
impossible for any bounded-acceleration vehicle.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

# Phase offset between consecutive UAV indices on the test trajectories,
# expressed in the curve parameter (radians for the figure eight, a fifth of
# the perimeter for the star).
TEST_PHASE_SEPARATION = 2.0 * math.pi / 5.0

# One fundamental trajectory period per 40 s episode.
DEFAULT_OMEGA = 2.0 * math.pi / 40.0

# Training curves run slower than the test figure eight; slow goals give the
# agent trackable targets while the value function is still forming.
TRAINING_OMEGA = 2.0 * math.pi / 60.0

FIGURE8_AMPLITUDE = 4.0
STAR_RADIUS = 4.0
STAR_SPEED = 1.5


class FormationFormatError(ValueError):
    """A formation document is malformed or has an unknown kind."""


class FormationKind(str, Enum):
    LISSAJOUS = "lissajous"
    TRANSLATING_POLYGON = "translating_polygon"
    FIXED_OFFSETS = "fixed_offsets"
    FIGURE8 = "figure8"
    STAR = "star"


TRAINING_KINDS = (
    FormationKind.LISSAJOUS,
    FormationKind.TRANSLATING_POLYGON,
    FormationKind.FIXED_OFFSETS,
)

_REQUIRED_PARAMS = {
    FormationKind.LISSAJOUS: {"ax", "ay", "nx", "ny", "phase_x", "phase_y", "omega"},
    FormationKind.TRANSLATING_POLYGON: {"radius", "center", "velocity", "phase"},
    FormationKind.FIXED_OFFSETS: {"points"},
    FormationKind.FIGURE8: {"amplitude", "omega"},
    FormationKind.STAR: {"radius", "speed"},
}


@dataclass(frozen=True)
class Goal:
    gx: float
    gy: float


@dataclass(frozen=True)
class FormationSpec:
    kind: FormationKind
    n_uavs: int
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_uavs < 1:
            raise ValueError(f"n_uavs must be >= 1, got {self.n_uavs}")
        missing = _REQUIRED_PARAMS[self.kind] - set(self.params)
        if missing:
            raise ValueError(f"{self.kind.value} spec missing params: {sorted(missing)}")
        if self.kind is FormationKind.FIXED_OFFSETS and len(self.params["points"]) != self.n_uavs:
            raise ValueError("fixed_offsets needs exactly one point per UAV")


def lissajous(
    n_uavs: int,
    *,
    ax: float,
    ay: float,
    nx: int,
    ny: int,
    phase_x: float,
    phase_y: float,
    omega: float = DEFAULT_OMEGA,
) -> FormationSpec:
    params = {
        "ax": float(ax),
        "ay": float(ay),
        "nx": int(nx),
        "ny": int(ny),
        "phase_x": float(phase_x),
        "phase_y": float(phase_y),
        "omega": float(omega),
    }
    return FormationSpec(FormationKind.LISSAJOUS, n_uavs, params)


def translating_polygon(
    n_uavs: int,
    *,
    radius: float,
    center: Sequence[float],
    velocity: Sequence[float],
    phase: float = 0.0,
) -> FormationSpec:
    params = {
        "radius": float(radius),
        "center": (float(center[0]), float(center[1])),
        "velocity": (float(velocity[0]), float(velocity[1])),
        "phase": float(phase),
    }
    return FormationSpec(FormationKind.TRANSLATING_POLYGON, n_uavs, params)


def fixed_offsets(points: Sequence[Sequence[float]]) -> FormationSpec:
    pts = tuple((float(p[0]), float(p[1])) for p in points)
    return FormationSpec(FormationKind.FIXED_OFFSETS, len(pts), {"points": pts})


def figure8(
    n_uavs: int = 5, *, amplitude: float = FIGURE8_AMPLITUDE, omega: float = DEFAULT_OMEGA
) -> FormationSpec:
    params = {"amplitude": float(amplitude), "omega": float(omega)}
    return FormationSpec(FormationKind.FIGURE8, n_uavs, params)


def star(n_uavs: int = 5, *, radius: float = STAR_RADIUS, speed: float = STAR_SPEED) -> FormationSpec:
    params = {"radius": float(radius), "speed": float(speed)}
    return FormationSpec(FormationKind.STAR, n_uavs, params)


@functools.lru_cache(maxsize=None)
def _star_polyline(radius: float):
    """Pentagram vertices in traversal order plus cumulative arc lengths."""
    outer = [
        (radius * math.cos(math.pi / 2 + 2 * math.pi * k / 5),
         radius * math.sin(math.pi / 2 + 2 * math.pi * k / 5))
        for k in range(5)
    ]
    pts = [outer[k] for k in (0, 2, 4, 1, 3)]
    lengths = []
    for i in range(5):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % 5]
        lengths.append(math.hypot(x1 - x0, y1 - y0))
    return tuple(pts), tuple(lengths), sum(lengths)


def _star_goal(params: dict, uav_index: int, t: float) -> Goal:
    pts, lengths, perimeter = _star_polyline(params["radius"])
    s = (params["speed"] * t + uav_index * perimeter / 5.0) % perimeter
    for i in range(5):
        if s <= lengths[i]:
            x0, y0 = pts[i]
            x1, y1 = pts[(i + 1) % 5]
            frac = s / lengths[i]
            return Goal(x0 + frac * (x1 - x0), y0 + frac * (y1 - y0))
        s -= lengths[i]
    return Goal(*pts[0])  # s == perimeter exactly, wrapped by fp rounding


def goal_position(spec: FormationSpec, uav_index: int, t: float) -> Goal:
    """Desired position of UAV `uav_index` at time t."""
    if not 0 <= uav_index < spec.n_uavs:
        raise IndexError(f"uav_index {uav_index} out of range for {spec.n_uavs} UAVs")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    p = spec.params
    kind = spec.kind
    if kind is FormationKind.FIGURE8:
        theta = p["omega"] * t + uav_index * TEST_PHASE_SEPARATION
        s = math.sin(theta)
        return Goal(p["amplitude"] * s, p["amplitude"] * s * math.cos(theta))
    if kind is FormationKind.STAR:
        return _star_goal(p, uav_index, t)
    if kind is FormationKind.LISSAJOUS:
        shifted = p["omega"] * t + uav_index * 2.0 * math.pi / spec.n_uavs
        return Goal(
            p["ax"] * math.sin(p["nx"] * shifted + p["phase_x"]),
            p["ay"] * math.sin(p["ny"] * shifted + p["phase_y"]),
        )
    if kind is FormationKind.TRANSLATING_POLYGON:
        cx = p["center"][0] + p["velocity"][0] * t
        cy = p["center"][1] + p["velocity"][1] * t
        ang = p["phase"] + 2.0 * math.pi * uav_index / spec.n_uavs
        return Goal(cx + p["radius"] * math.cos(ang), cy + p["radius"] * math.sin(ang))
    # FIXED_OFFSETS
    px, py = p["points"][uav_index]
    return Goal(px, py)


def sample_training_formation(rng: np.random.Generator, n_uavs: int) -> FormationSpec:
    """Draw a random spec from the training families (never figure8/star).

    Static goals get half the probability mass: they carry the cleanest
    value-learning signal, and the moving families still supply the
    time-varying structure the test formations need.
    """
    if n_uavs < 1:
        raise ValueError(f"n_uavs must be >= 1, got {n_uavs}")
    u = rng.random()
    if u < 0.25:
        return lissajous(
            n_uavs,
            ax=rng.uniform(1.0, 4.0),
            ay=rng.uniform(1.0, 4.0),
            nx=int(rng.integers(1, 4)),
            ny=int(rng.integers(1, 4)),
            phase_x=rng.uniform(0.0, 2.0 * math.pi),
            phase_y=rng.uniform(0.0, 2.0 * math.pi),
            omega=TRAINING_OMEGA,
        )
    if u < 0.5:
        heading = rng.uniform(0.0, 2.0 * math.pi)
        speed = rng.uniform(0.05, 0.3)
        return translating_polygon(
            n_uavs,
            radius=rng.uniform(0.3, 1.0),
            center=rng.uniform(-1.0, 1.0, size=2),
            velocity=(speed * math.cos(heading), speed * math.sin(heading)),
            phase=rng.uniform(0.0, 2.0 * math.pi),
        )
    return fixed_offsets(rng.uniform(-2.0, 2.0, size=(n_uavs, 2)))


def test_set(n_uavs: int) -> list[FormationSpec]:
    """The held-out evaluation formations: figure eight, then the star."""
    if n_uavs < 1:
        raise ValueError(f"n_uavs must be >= 1, got {n_uavs}")
    return [figure8(n_uavs), star(n_uavs)]


def to_document(spec: FormationSpec) -> dict[str, Any]:
    """JSON-ready document: kind tag, team size, flat parameter map."""
    params: dict[str, Any] = {}
    for key, value in spec.params.items():
        if isinstance(value, tuple):
            params[key] = [list(v) if isinstance(v, tuple) else v for v in value]
        else:
            params[key] = value
    return {"kind": spec.kind.value, "n_uavs": spec.n_uavs, "params": params}


def from_document(doc: dict[str, Any]) -> FormationSpec:
    if not isinstance(doc, dict):
        raise FormationFormatError("formation document must be a JSON object")
    try:
        kind = FormationKind(doc["kind"])
    except (KeyError, ValueError) as exc:
        raise FormationFormatError(f"unknown or missing formation kind: {doc.get('kind')!r}") from exc
    try:
        n_uavs = int(doc["n_uavs"])
        raw = dict(doc["params"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormationFormatError("formation document needs n_uavs and params") from exc
    params: dict[str, Any] = {}
    for key, value in raw.items():
        if isinstance(value, list):
            params[key] = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        else:
            params[key] = value
    try:
        return FormationSpec(kind, n_uavs, params)
    except (ValueError, TypeError) as exc:
        raise FormationFormatError(str(exc)) from exc


def save_formation(spec: FormationSpec, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_document(spec), fh, indent=2)
        fh.write("\n")


def load_formation(path) -> FormationSpec:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormationFormatError(f"not valid JSON: {path}") from exc
    return from_document(doc)
