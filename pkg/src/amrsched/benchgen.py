"""Deterministic generation of Solomon-format customer base files.

The benchmark sweep needs six customer bases spanning clustered (C), random
(R), and mixed (RC) geographies, each in a narrow-window (type 1) and a
wide-window (type 2) variant.  The original benchmark archives are not
vendored here, so this module synthesizes stand-ins with the same text
layout, naming scheme, and qualitative structure; window openings are kept
far enough out that a direct depot trip always arrives before a window opens
even at peak speeds, so every request is serviceable on its own.

Generation is fully seeded per base name: regenerating a base always yields
byte-identical text, and the files committed under ``data/solomon`` are the
direct output of :func:`write_base_files`.
"""

from __future__ import annotations

import math
import random
from pathlib import Path

GRID = 100  # coordinates live on [0, GRID]^2
DEPOT_XY = (40, 50)
CUSTOMERS = 100

# Margin guaranteeing window openings after the longest direct first leg,
# elevator detour and floor runs included, at the slowest speed regime.
_SPEED_MARGIN = 1.3 * 1.4
_FIXED_MARGIN = 60.0
_CENTER = (GRID / 2.0, GRID / 2.0)

_BASES = {
    # name: (kind, horizon, capacity, service, window style); capacities are
    # sized so a full load roughly matches what one trip can serve before
    # window pressure forces another robot, keeping construction and random
    # starts in the same fleet-size band
    "C108": ("C", 1236, 90, 90, "narrow"),
    "C208": ("C", 3390, 335, 90, "wide"),
    "R101": ("R", 1200, 165, 10, "narrow"),
    "R202": ("R", 3200, 410, 10, "wide"),
    "RC101": ("RC", 1200, 170, 10, "narrow"),
    "RC202": ("RC", 3200, 490, 10, "wide"),
}

_SEEDS = {name: 7001 + 13 * i for i, name in enumerate(sorted(_BASES))}

BASE_NAMES = tuple(sorted(_BASES))


def _earliest_open(x: float, y: float) -> float:
    """Lower bound for a window opening so the first direct leg never misses it."""
    d = math.hypot(DEPOT_XY[0] - _CENTER[0], DEPOT_XY[1] - _CENTER[1]) + math.hypot(
        x - _CENTER[0], y - _CENTER[1]
    )
    return _SPEED_MARGIN * d + _FIXED_MARGIN


def _cluster_points(rng: random.Random, clusters: int, count: int) -> list[tuple[int, int]]:
    centers = [(rng.uniform(12, GRID - 12), rng.uniform(12, GRID - 12)) for _ in range(clusters)]
    points = []
    for i in range(count):
        cx, cy = centers[i % clusters]
        x = min(max(int(round(rng.gauss(cx, 5.0))), 0), GRID)
        y = min(max(int(round(rng.gauss(cy, 5.0))), 0), GRID)
        points.append((x, y))
    return points


def _window(rng: random.Random, style: str, horizon: int, x: int, y: int, center_hint: float | None = None) -> tuple[int, int]:
    if style == "narrow":
        width = rng.randint(45, 110)
    else:
        width = rng.randint(int(0.22 * horizon), int(0.40 * horizon))
    lo = _earliest_open(x, y) + width / 2.0
    hi = 0.97 * horizon - width / 2.0
    center = rng.uniform(lo, hi)
    if center_hint is not None:
        center = min(max(center_hint + rng.uniform(-40.0, 40.0), lo), hi)
    e = int(round(center - width / 2.0))
    return e, e + width


def make_base_text(name: str) -> str:
    """Render one base as Solomon-format text, reproducibly for its name."""
    if name not in _BASES:
        raise ValueError(f"unknown base {name!r}, expected one of {BASE_NAMES}")
    kind, horizon, capacity, service, style = _BASES[name]
    rng = random.Random(_SEEDS[name])
    if kind == "C":
        points = _cluster_points(rng, clusters=10, count=CUSTOMERS)
    elif kind == "R":
        points = [(rng.randint(0, GRID), rng.randint(0, GRID)) for _ in range(CUSTOMERS)]
    else:
        half = CUSTOMERS // 2
        points = _cluster_points(rng, clusters=5, count=half)
        points += [(rng.randint(0, GRID), rng.randint(0, GRID)) for _ in range(CUSTOMERS - half)]

    rows = []
    cluster_times: dict[int, float] = {}
    for i, (x, y) in enumerate(points):
        if kind == "C" and style == "narrow":
            # members of one cluster share a neighborhood of the day
            key = i % 10
            if key not in cluster_times:
                cluster_times[key] = rng.uniform(0.25 * horizon, 0.85 * horizon)
            e, h = _window(rng, style, horizon, x, y, center_hint=cluster_times[key])
        else:
            e, h = _window(rng, style, horizon, x, y)
        demand = rng.choice((10, 20, 30, 40)) if kind == "C" else rng.randint(5, 35)
        rows.append((x, y, demand, e, h, service))
    rng.shuffle(rows)

    lines = [
        name,
        "",
        "VEHICLE",
        "NUMBER     CAPACITY",
        f"{25:>6}{capacity:>13}",
        "",
        "CUSTOMER",
        "CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME",
        "",
        _row(0, DEPOT_XY[0], DEPOT_XY[1], 0, 0, horizon, 0),
    ]
    for i, (x, y, demand, e, h, serv) in enumerate(rows, start=1):
        lines.append(_row(i, x, y, demand, e, h, serv))
    return "\n".join(lines) + "\n"


def _row(cid, x, y, demand, ready, due, service) -> str:
    return f"{cid:>5}{x:>11}{y:>12}{demand:>11}{ready:>13}{due:>11}{service:>14}"


def write_base_files(outdir: str | Path) -> list[Path]:
    """Write all six bases into ``outdir``; returns the created paths."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name in BASE_NAMES:
        path = out / f"{name}.txt"
        path.write_text(make_base_text(name))
        paths.append(path)
    return paths
