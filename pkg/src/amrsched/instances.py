"""Problem instances: requests, speed profiles, distances, and file formats.

An :class:`Instance` describes one day of hospital deliveries: a ground-floor
depot, floor-bound requests with hard-open / soft-close time windows, a single
elevator connecting floors, and a piecewise speed profile giving the mean
seconds-per-meter and seconds-per-level of the robots over the day.

Instances are built from customer files in the classic Solomon text layout
(``parse_solomon``) through a seeded extension recipe (``extend_instance``)
that adds floors, the elevator, the speed profile, and the cost model, and
they round-trip losslessly through a JSON document (``save_instance`` /
``load_instance``).

Instances are treated as immutable after construction; the constructor
precomputes distance and per-zone travel-time matrices for the solvers.
"""

from __future__ import annotations

import bisect
import json
import math
import random
from dataclasses import dataclass, field, replace

import numpy as np

from .normals import Gaussian

# Mean speeds (seconds per meter, seconds per level) by demand period.
PERIOD_SPEEDS = {
    "P1": (1.4, 3.2),  # morning peak
    "P2": (1.3, 3.0),  # afternoon peak
    "P3": (1.1, 2.7),  # off-peak
}

# Whole-day timetable as offsets from the 07:30 start: morning peak
# 08:00-12:00, afternoon peak 14:00-16:00, off-peak speeds elsewhere.
DAY_TIMETABLE = (
    (0.0, 1800.0, "P3"),
    (1800.0, 16200.0, "P1"),
    (16200.0, 23400.0, "P3"),
    (23400.0, 30600.0, "P2"),
    (30600.0, None, "P3"),
)
TRAVEL_VARIANCE = 0.15  # s^2 per m^2
FLOOR_VARIANCE = 0.5  # s^2 per level^2
SERVICE_VARIANCE = 15.0  # s^2

AMR_DAILY_COST = 30.0  # $ per robot per day
LATE_VIOLATION_COST = 0.1  # $ per expected window miss
TRAVEL_COST_PER_SECOND = 0.01  # $ per expected travel second

DAY_SECONDS = 86400.0
DEFAULT_T0 = "07:30"
DEPOT_FLOOR = 1
FLOOR_CHOICES = (1, 2, 3, 4, 5, 6)

INSTANCE_FORMAT = "amrsched-instance-v1"


class SolomonFormatError(ValueError):
    """Raised when a Solomon customer file cannot be parsed."""


class InstanceFormatError(ValueError):
    """Raised when an instance document is missing or corrupting fields."""


class InfeasibleInstanceError(ValueError):
    """Raised when an instance cannot be served at all (demand above capacity)."""


def clock_to_seconds(clock: str, t0: str = DEFAULT_T0) -> float:
    """Seconds after the day start ``t0`` for a wall-clock string.

    >>> clock_to_seconds("08:00")
    1800.0
    """
    return _parse_clock(clock) - _parse_clock(t0)


def seconds_to_clock(seconds: float, t0: str = DEFAULT_T0) -> str:
    """Wall-clock ``HH:MM:SS`` string for seconds elapsed since ``t0``."""
    total = int(_parse_clock(t0) + seconds)
    total %= int(DAY_SECONDS)
    return f"{total // 3600:02d}:{total % 3600 // 60:02d}:{total % 60:02d}"


def _parse_clock(clock: str) -> float:
    parts = clock.split(":")
    if len(parts) not in (2, 3) or not all(p.isdigit() for p in parts):
        raise ValueError(f"bad clock string: {clock!r}")
    h, m = int(parts[0]), int(parts[1])
    s = int(parts[2]) if len(parts) == 3 else 0
    return float(h * 3600 + m * 60 + s)


@dataclass(frozen=True)
class Request:
    """One delivery request: a point on a floor with a window and a demand."""

    id: int
    x: float
    y: float
    floor: int
    demand: float
    ready: float  # window open e_i, hard (arrivals wait)
    due: float  # window close h_i, soft (misses are penalized)
    service: Gaussian  # on-site handling duration


@dataclass(frozen=True)
class SpeedZone:
    """One time slice of the day with its own mean speeds."""

    start: float
    end: float
    travel_mean: float  # s per m
    floor_mean: float  # s per level


@dataclass(frozen=True)
class SpeedProfile:
    """Piecewise-constant speed means plus day-wide speed variances."""

    zones: tuple[SpeedZone, ...]
    travel_variance: float = TRAVEL_VARIANCE
    floor_variance: float = FLOOR_VARIANCE

    def __post_init__(self) -> None:
        if not self.zones:
            raise ValueError("speed profile needs at least one zone")
        prev_end = None
        for z in self.zones:
            if z.end <= z.start or z.travel_mean <= 0 or z.floor_mean <= 0:
                raise ValueError(f"bad speed zone: {z}")
            if prev_end is not None and not math.isclose(z.start, prev_end):
                raise ValueError("speed zones must be contiguous and sorted")
            prev_end = z.end
        if self.travel_variance < 0 or self.floor_variance < 0:
            raise ValueError("speed variances must be nonnegative")

    @classmethod
    def for_period(cls, period: str, horizon: float = DAY_SECONDS) -> "SpeedProfile":
        """Single zone covering the whole horizon with the period's means."""
        try:
            travel_mean, floor_mean = PERIOD_SPEEDS[period]
        except KeyError:
            raise ValueError(f"unknown period {period!r}, expected one of {sorted(PERIOD_SPEEDS)}")
        return cls(zones=(SpeedZone(0.0, horizon, travel_mean, floor_mean),))

    @classmethod
    def for_day(cls, horizon: float = DAY_SECONDS) -> "SpeedProfile":
        """All peaks in one profile, following the whole-day timetable."""
        zones = []
        for start, end, period in DAY_TIMETABLE:
            travel_mean, floor_mean = PERIOD_SPEEDS[period]
            zones.append(SpeedZone(start, end if end is not None else horizon, travel_mean, floor_mean))
        return cls(zones=tuple(zones))


@dataclass
class Instance:
    """One day of deliveries with all data the solvers need.

    Node ids: 0 is the depot, requests use their own ids 1..n.  Every
    distance is same-floor Euclidean, or routed through the single elevator
    when floors differ.
    """

    label: str
    depot: tuple[float, float, int]  # x, y, floor
    elevator: tuple[float, float]
    requests: tuple[Request, ...]
    capacity: float
    profile: SpeedProfile
    horizon: float = DAY_SECONDS
    amr_cost: float = AMR_DAILY_COST
    late_cost: float = LATE_VIOLATION_COST
    travel_cost: float = TRAVEL_COST_PER_SECOND
    t0: str = DEFAULT_T0
    time_scale: float = 1.0
    seed: int | None = None
    source: str = ""

    # solver-facing caches, filled in __post_init__
    _zone_starts: list[float] = field(init=False, repr=False, compare=False)
    _mu_t: list[list[list[float]]] = field(init=False, repr=False, compare=False)
    _var_t: list[list[list[float]]] = field(init=False, repr=False, compare=False)
    _dist: np.ndarray = field(init=False, repr=False, compare=False)
    _levels: np.ndarray = field(init=False, repr=False, compare=False)
    _ready: list[float] = field(init=False, repr=False, compare=False)
    _due: list[float] = field(init=False, repr=False, compare=False)
    _smean: list[float] = field(init=False, repr=False, compare=False)
    _svar: list[float] = field(init=False, repr=False, compare=False)
    _demand: list[float] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        self._validate()
        self._build_caches()

    def _validate(self) -> None:
        if self.capacity <= 0:
            raise InstanceFormatError("capacity must be positive")
        if not (self.amr_cost > self.late_cost > self.travel_cost >= 0):
            raise InstanceFormatError("cost weights must satisfy fixed > late > travel >= 0")
        if self.horizon <= 0:
            raise InstanceFormatError("horizon must be positive")
        last_zone_end = self.profile.zones[-1].end
        if self.profile.zones[0].start != 0.0 or last_zone_end < self.horizon:
            raise InstanceFormatError("speed zones must cover [0, horizon]")
        for pos, req in enumerate(self.requests, start=1):
            if req.id != pos:
                raise InstanceFormatError("request ids must be contiguous from 1 in order")
            if req.demand <= 0:
                raise InstanceFormatError(f"request {req.id}: demand must be positive")
            if req.demand > self.capacity:
                raise InfeasibleInstanceError(
                    f"request {req.id}: demand {req.demand} exceeds capacity {self.capacity}"
                )
            if not (0.0 <= req.ready <= req.due <= self.horizon):
                raise InstanceFormatError(
                    f"request {req.id}: window [{req.ready}, {req.due}] outside [0, horizon]"
                )

    def _build_caches(self) -> None:
        n = len(self.requests)
        xs = np.array([self.depot[0]] + [r.x for r in self.requests], dtype=float)
        ys = np.array([self.depot[1]] + [r.y for r in self.requests], dtype=float)
        floors = np.array([self.depot[2]] + [r.floor for r in self.requests], dtype=int)
        direct = np.hypot(xs[:, None] - xs[None, :], ys[:, None] - ys[None, :])
        ex, ey = self.elevator
        to_elevator = np.hypot(xs - ex, ys - ey)
        via = to_elevator[:, None] + to_elevator[None, :]
        levels = np.abs(floors[:, None] - floors[None, :])
        self._dist = np.where(levels == 0, direct, via)
        self._levels = levels
        self._zone_starts = [z.start for z in self.profile.zones]
        self._mu_t, self._var_t = [], []
        tv, fv = self.profile.travel_variance, self.profile.floor_variance
        var = self._dist**2 * tv + levels.astype(float) ** 2 * fv
        for z in self.profile.zones:
            mu = self._dist * z.travel_mean + levels * z.floor_mean
            self._mu_t.append(mu.tolist())
            self._var_t.append(var.tolist())
        self._ready = [0.0] + [r.ready for r in self.requests]
        self._due = [self.horizon] + [r.due for r in self.requests]
        self._smean = [0.0] + [r.service.mean for r in self.requests]
        self._svar = [0.0] + [r.service.variance for r in self.requests]
        self._demand = [0.0] + [r.demand for r in self.requests]
        assert n + 1 == len(self._ready)

    @property
    def n(self) -> int:
        return len(self.requests)

    def request(self, rid: int) -> Request:
        if not 1 <= rid <= self.n:
            raise KeyError(f"unknown request id {rid}")
        return self.requests[rid - 1]

    def _zone_index(self, departure: float) -> int:
        if len(self._zone_starts) == 1:
            return 0
        idx = bisect.bisect_right(self._zone_starts, departure) - 1
        return min(max(idx, 0), len(self._zone_starts) - 1)

    def distance(self, i: int, j: int) -> tuple[float, int]:
        """(meters, elevator levels) between nodes, elevator-aware."""
        self._check_node(i)
        self._check_node(j)
        return float(self._dist[i, j]), int(self._levels[i, j])

    def travel_time(self, i: int, j: int, departure: float = 0.0) -> Gaussian:
        """Travel duration of the leg i -> j leaving at ``departure`` seconds.

        The mean uses the speed zone containing the departure instant for the
        entire leg; departures past the last zone reuse that zone.
        """
        self._check_node(i)
        self._check_node(j)
        z = self._zone_index(departure)
        return Gaussian(self._mu_t[z][i][j], self._var_t[z][i][j])

    def _check_node(self, i: int) -> None:
        if not 0 <= i <= self.n:
            raise KeyError(f"unknown node id {i}")


@dataclass(frozen=True)
class SolomonCustomer:
    id: int
    x: float
    y: float
    demand: float
    ready: float
    due: float
    service: float


@dataclass(frozen=True)
class RawSolomon:
    """A parsed Solomon customer file: header data plus rows in file order."""

    name: str
    capacity: float
    vehicle_count: int
    depot: SolomonCustomer
    customers: tuple[SolomonCustomer, ...]


def parse_solomon(text: str) -> RawSolomon:
    """Parse the classic Solomon text layout.

    The file carries an instance name, a VEHICLE section with the fleet
    capacity, and a CUSTOMER table whose row id 0 is the depot.  Any customer
    count is accepted.  Malformed rows raise :class:`SolomonFormatError`
    naming the line.
    """
    lines = text.splitlines()
    name = None
    capacity = vehicle_count = None
    rows: list[SolomonCustomer] = []
    section = "head"
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        upper = line.upper()
        if name is None:
            name = line.split()[0]
            continue
        if upper.startswith("VEHICLE"):
            section = "vehicle"
            continue
        if upper.startswith("CUSTOMER"):
            section = "customer"
            continue
        if section == "vehicle":
            if upper.startswith("NUMBER"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise SolomonFormatError(f"line {lineno}: expected vehicle count and capacity")
            try:
                vehicle_count, capacity = int(parts[0]), float(parts[1])
            except ValueError:
                raise SolomonFormatError(f"line {lineno}: bad vehicle numbers: {line!r}")
            section = "head"
        elif section == "customer":
            if upper.startswith("CUST"):
                continue
            parts = line.split()
            if len(parts) != 7:
                raise SolomonFormatError(f"line {lineno}: expected 7 customer fields, got {len(parts)}")
            try:
                rows.append(
                    SolomonCustomer(
                        id=int(parts[0]),
                        x=float(parts[1]),
                        y=float(parts[2]),
                        demand=float(parts[3]),
                        ready=float(parts[4]),
                        due=float(parts[5]),
                        service=float(parts[6]),
                    )
                )
            except ValueError:
                raise SolomonFormatError(f"line {lineno}: bad customer row: {line!r}")
    if name is None:
        raise SolomonFormatError("empty stream: no header line")
    if capacity is None:
        raise SolomonFormatError("missing VEHICLE section with fleet capacity")
    depot = next((r for r in rows if r.id == 0), None)
    if depot is None:
        raise SolomonFormatError("missing depot row (customer id 0)")
    customers = tuple(r for r in rows if r.id != 0)
    if not customers:
        raise SolomonFormatError("no customer rows besides the depot")
    return RawSolomon(
        name=name,
        capacity=capacity,
        vehicle_count=vehicle_count if vehicle_count is not None else 0,
        depot=depot,
        customers=customers,
    )


def extend_instance(
    raw: RawSolomon,
    period: str,
    n: int,
    seed: int,
    time_scale: float = 1.0,
) -> Instance:
    """Turn a parsed Solomon base into a hospital instance.

    Takes the first ``n`` customers in file order, assigns each a floor drawn
    uniformly from 1..6 with the given seed, places the single elevator at the
    center of the coordinate bounding box (depot included), and applies the
    period's speed means over the whole day.  ``period="day"`` instead uses
    the five-zone whole-day timetable, for plans that cross both peaks.
    Solomon time units map to seconds via ``time_scale`` (default 1:1).  The
    label follows the ``<period>-<base>-<n>`` convention, e.g. ``P1-C108-100``.
    """
    if period != "day" and period not in PERIOD_SPEEDS:
        raise ValueError(
            f"unknown period {period!r}, expected 'day' or one of {sorted(PERIOD_SPEEDS)}"
        )
    if not 1 <= n <= len(raw.customers):
        raise ValueError(f"cannot take {n} customers from a base with {len(raw.customers)}")
    if time_scale <= 0:
        raise ValueError("time_scale must be positive")
    chosen = raw.customers[:n]
    rng = random.Random(seed)
    floors = [rng.choice(FLOOR_CHOICES) for _ in chosen]
    xs = [raw.depot.x] + [c.x for c in chosen]
    ys = [raw.depot.y] + [c.y for c in chosen]
    elevator = ((min(xs) + max(xs)) / 2.0, (min(ys) + max(ys)) / 2.0)
    requests = tuple(
        Request(
            id=i,
            x=c.x,
            y=c.y,
            floor=f,
            demand=c.demand,
            ready=c.ready * time_scale,
            due=c.due * time_scale,
            service=Gaussian(c.service * time_scale, SERVICE_VARIANCE),
        )
        for i, (c, f) in enumerate(zip(chosen, floors), start=1)
    )
    profile = SpeedProfile.for_day() if period == "day" else SpeedProfile.for_period(period)
    return Instance(
        label=f"{period.upper()}-{raw.name}-{n}",
        depot=(raw.depot.x, raw.depot.y, DEPOT_FLOOR),
        elevator=elevator,
        requests=requests,
        capacity=raw.capacity,
        profile=profile,
        seed=seed,
        time_scale=time_scale,
        source=raw.name,
    )


def zero_variance_copy(inst: Instance) -> Instance:
    """Deterministic twin of an instance: all speed and service variances zero."""
    profile = replace(inst.profile, travel_variance=0.0, floor_variance=0.0)
    requests = tuple(
        replace(r, service=Gaussian(r.service.mean, 0.0)) for r in inst.requests
    )
    return replace(inst, profile=profile, requests=requests)


def save_instance(inst: Instance) -> str:
    """Serialize an instance to its JSON document (stable byte-for-byte)."""
    doc = {
        "format": INSTANCE_FORMAT,
        "label": inst.label,
        "source": inst.source,
        "seed": inst.seed,
        "time_scale": inst.time_scale,
        "t0": inst.t0,
        "horizon": inst.horizon,
        "capacity": inst.capacity,
        "costs": {
            "amr_daily": inst.amr_cost,
            "late_violation": inst.late_cost,
            "travel_per_second": inst.travel_cost,
        },
        "depot": {"x": inst.depot[0], "y": inst.depot[1], "floor": inst.depot[2]},
        "elevator": {"x": inst.elevator[0], "y": inst.elevator[1]},
        "profile": {
            "travel_variance": inst.profile.travel_variance,
            "floor_variance": inst.profile.floor_variance,
            "zones": [
                {
                    "start": z.start,
                    "end": z.end,
                    "travel_mean": z.travel_mean,
                    "floor_mean": z.floor_mean,
                }
                for z in inst.profile.zones
            ],
        },
        "requests": [
            {
                "id": r.id,
                "x": r.x,
                "y": r.y,
                "floor": r.floor,
                "demand": r.demand,
                "window": [r.ready, r.due],
                "service_mean": r.service.mean,
                "service_variance": r.service.variance,
            }
            for r in inst.requests
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_instance(text: str) -> Instance:
    """Parse an instance document, validating presence and shape of each field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")

    def need(obj, key, where="instance"):
        if not isinstance(obj, dict) or key not in obj:
            raise InstanceFormatError(f'missing field "{key}" in {where}')
        return obj[key]

    costs = need(doc, "costs")
    depot = need(doc, "depot")
    elevator = need(doc, "elevator")
    profile_doc = need(doc, "profile")
    zones = []
    for z in need(profile_doc, "zones", "profile"):
        zones.append(
            SpeedZone(
                start=float(need(z, "start", "zone")),
                end=float(need(z, "end", "zone")),
                travel_mean=float(need(z, "travel_mean", "zone")),
                floor_mean=float(need(z, "floor_mean", "zone")),
            )
        )
    requests = []
    for r in need(doc, "requests"):
        window = need(r, "window", "request")
        if not (isinstance(window, list) and len(window) == 2):
            raise InstanceFormatError('request "window" must be a [ready, due] pair')
        requests.append(
            Request(
                id=int(need(r, "id", "request")),
                x=float(need(r, "x", "request")),
                y=float(need(r, "y", "request")),
                floor=int(need(r, "floor", "request")),
                demand=float(need(r, "demand", "request")),
                ready=float(window[0]),
                due=float(window[1]),
                service=Gaussian(
                    float(need(r, "service_mean", "request")),
                    float(need(r, "service_variance", "request")),
                ),
            )
        )
    try:
        return Instance(
            label=str(need(doc, "label")),
            depot=(float(need(depot, "x", "depot")), float(need(depot, "y", "depot")), int(need(depot, "floor", "depot"))),
            elevator=(float(need(elevator, "x", "elevator")), float(need(elevator, "y", "elevator"))),
            requests=tuple(requests),
            capacity=float(need(doc, "capacity")),
            profile=SpeedProfile(
                zones=tuple(zones),
                travel_variance=float(need(profile_doc, "travel_variance", "profile")),
                floor_variance=float(need(profile_doc, "floor_variance", "profile")),
            ),
            horizon=float(need(doc, "horizon")),
            amr_cost=float(need(costs, "amr_daily", "costs")),
            late_cost=float(need(costs, "late_violation", "costs")),
            travel_cost=float(need(costs, "travel_per_second", "costs")),
            t0=str(need(doc, "t0")),
            time_scale=float(need(doc, "time_scale")),
            seed=doc.get("seed"),
            source=str(need(doc, "source")),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InstanceFormatError) or isinstance(exc, InfeasibleInstanceError):
            raise
        raise InstanceFormatError(f"bad field value: {exc}") from exc
