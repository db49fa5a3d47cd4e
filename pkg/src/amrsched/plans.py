"""Plans, propagated schedules, and the three-part daily cost.

A :class:`Plan` assigns every request to exactly one position of one trip of
one robot.  Trips of the same robot run back to back: each later trip leaves
the depot at the previous trip's (random) return time, which is how the
multi-trip coupling enters the arrival-time propagation.

Evaluation walks each robot's day once, carrying a Gaussian clock:

* arrival = departure + travel leg (independent normal sum),
* service start = max(arrival, window open), re-approximated as a normal,
* departure = start + service duration.

The daily cost is ``fixed + penalty + travel``: a per-robot daily rate, the
expected number of soft-deadline misses priced per request, and the expected
travel seconds priced per second, depot legs included.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass

from .instances import Instance, seconds_to_clock
from .normals import Gaussian, _clipped_max, _tail_probability

EPS = 1e-6

PLAN_FORMAT = "amrsched-plan-v1"

Trip = list  # list[int], request ids in service order


@dataclass
class Plan:
    """Routes for the whole fleet: ``amrs[k]`` is robot k's list of trips."""

    amrs: list[list[Trip]]

    @property
    def m(self) -> int:
        """Number of robots in use."""
        return len(self.amrs)

    def all_requests(self) -> list[int]:
        return [rid for trips in self.amrs for trip in trips for rid in trip]

    def copy(self) -> "Plan":
        return Plan([[list(trip) for trip in trips] for trips in self.amrs])

    def validate(self, inst: Instance | None = None) -> None:
        """Check structural invariants: no empty trips or robots, each request once."""
        seen = set()
        for trips in self.amrs:
            if not trips:
                raise ValueError("empty robot retained in plan")
            for trip in trips:
                if not trip:
                    raise ValueError("empty trip retained in plan")
                for rid in trip:
                    if rid in seen:
                        raise ValueError(f"request {rid} appears more than once")
                    seen.add(rid)
        if inst is not None:
            for rid in seen:
                inst.request(rid)

    def route_string(self, k: int) -> str:
        """Depot-delimited route of robot k, e.g. ``0-14-0-35-32-33-0``."""
        parts = ["0"]
        for trip in self.amrs[k]:
            parts.extend(str(rid) for rid in trip)
            parts.append("0")
        return "-".join(parts)

    @staticmethod
    def parse_route_string(route: str) -> list[Trip]:
        ids = [int(tok) for tok in route.split("-")]
        if not ids or ids[0] != 0 or ids[-1] != 0:
            raise ValueError(f"route must start and end at the depot: {route!r}")
        trips: list[Trip] = []
        current: Trip = []
        for rid in ids[1:]:
            if rid == 0:
                if current:
                    trips.append(current)
                current = []
            elif rid < 0:
                raise ValueError(f"bad request id {rid} in route {route!r}")
            else:
                current.append(rid)
        return trips


@dataclass(frozen=True)
class Visit:
    """The propagated state of one served request."""

    request_id: int
    amr: int
    trip: int
    position: int
    arrival: Gaussian
    start: Gaussian
    remaining_load: float  # capacity left on arrival, before unloading
    late_probability: float


@dataclass
class Schedule:
    """Propagated visits plus per-trip depot returns, per robot."""

    visits: list[Visit]
    trip_returns: list[list[Gaussian]]

    def by_request(self) -> dict[int, Visit]:
        return {v.request_id: v for v in self.visits}


@dataclass(frozen=True)
class CostBreakdown:
    """The three cost terms; ``total`` is their exact sum."""

    fixed: float
    penalty: float
    travel: float

    @property
    def total(self) -> float:
        return self.fixed + self.penalty + self.travel


def _zone_of(zone_starts, departure: float) -> int:
    idx = bisect.bisect_right(zone_starts, departure) - 1
    return max(0, min(idx, len(zone_starts) - 1))


def _amr_walk(trips, inst: Instance, record=None):
    """Propagate one robot's day of back-to-back trips.

    Returns ``(late_sum, travel_mean_sum, returns)`` where ``late_sum`` is the
    sum of window-miss probabilities over the robot's visits, and ``returns``
    lists the (mean, variance) arrival back at the depot after each trip.
    When ``record`` is a list it receives one Visit-shaped tuple per visit:
    ``(rid, trip_idx, pos, a_mean, a_var, y_mean, y_var, remaining, late)``.

    This is the hot path of every solver; it works on raw floats and the
    instance's precomputed per-zone travel matrices.
    """
    mu_t = inst._mu_t
    var_t = inst._var_t
    zone_starts = inst._zone_starts
    single = len(zone_starts) == 1
    ready = inst._ready
    due = inst._due
    smean = inst._smean
    svar = inst._svar
    demand = inst._demand
    capacity = inst.capacity

    late_sum = 0.0
    travel_sum = 0.0
    returns = []
    dep_m = 0.0  # depot departure of the upcoming trip
    dep_v = 0.0
    for ti, trip in enumerate(trips):
        prev = 0
        cur_m = dep_m
        cur_v = dep_v
        remaining = capacity
        for pos, rid in enumerate(trip):
            z = 0 if single else _zone_of(zone_starts, cur_m)
            leg_m = mu_t[z][prev][rid]
            a_m = cur_m + leg_m
            a_v = cur_v + var_t[z][prev][rid]
            travel_sum += leg_m
            late = _tail_probability(a_m, a_v, due[rid])
            late_sum += late
            y_m, y_v = _clipped_max(a_m, a_v, ready[rid])
            if record is not None:
                record.append((rid, ti, pos, a_m, a_v, y_m, y_v, remaining, late))
            remaining -= demand[rid]
            cur_m = y_m + smean[rid]
            cur_v = y_v + svar[rid]
            prev = rid
        z = 0 if single else _zone_of(zone_starts, cur_m)
        travel_sum += mu_t[z][prev][0]
        dep_m = cur_m + mu_t[z][prev][0]
        dep_v = cur_v + var_t[z][prev][0]
        returns.append((dep_m, dep_v))
    return late_sum, travel_sum, returns


def propagate(plan: Plan, inst: Instance) -> Schedule:
    """Gaussian schedule for every visit of the plan, robots in order."""
    visits: list[Visit] = []
    all_returns: list[list[Gaussian]] = []
    for k, trips in enumerate(plan.amrs):
        record: list = []
        _, _, returns = _amr_walk(trips, inst, record)
        for rid, ti, pos, a_m, a_v, y_m, y_v, remaining, late in record:
            visits.append(
                Visit(
                    request_id=rid,
                    amr=k,
                    trip=ti,
                    position=pos,
                    arrival=Gaussian(a_m, a_v),
                    start=Gaussian(y_m, y_v),
                    remaining_load=remaining,
                    late_probability=late,
                )
            )
        all_returns.append([Gaussian(m, v) for m, v in returns])
    return Schedule(visits=visits, trip_returns=all_returns)


def evaluate(plan: Plan, inst: Instance) -> CostBreakdown:
    """Expected daily cost of a plan under the instance's cost weights."""
    late = 0.0
    travel = 0.0
    m = 0
    for trips in plan.amrs:
        if not trips:
            continue
        m += 1
        l, t, _ = _amr_walk(trips, inst)
        late += l
        travel += t
    return CostBreakdown(
        fixed=inst.amr_cost * m,
        penalty=inst.late_cost * late,
        travel=inst.travel_cost * travel,
    )


def capacity_violations(plan: Plan, inst: Instance) -> list[tuple[int, int, int]]:
    """Positions whose demand exceeds the load remaining on the shelf.

    Returns ``(amr, trip, position)`` triples; the running load only resets
    at trip starts, so every visit past a breach keeps being reported until
    a depot reload is inserted.
    """
    demand = inst._demand
    out = []
    for a, trips in enumerate(plan.amrs):
        for t, trip in enumerate(trips):
            remaining = inst.capacity
            for i, rid in enumerate(trip):
                if demand[rid] > remaining + EPS:
                    out.append((a, t, i))
                remaining -= demand[rid]
    return out


def service_probability(plan: Plan, inst: Instance) -> tuple[float, list[float]]:
    """Fleet-wide and per-robot chance that no window is missed at all.

    Each robot's value is the minimum over its visits of the on-time
    probability ``1 - P(arrival > due)``; the fleet value is the minimum over
    robots.  An empty plan serves nothing and scores 1.
    """
    per_amr = []
    for trips in plan.amrs:
        record: list = []
        _amr_walk(trips, inst, record)
        r = 1.0
        for row in record:
            ontime = 1.0 - row[8]
            if ontime < r:
                r = ontime
        per_amr.append(r)
    return (min(per_amr) if per_amr else 1.0), per_amr


def save_plan(plan: Plan, inst: Instance) -> str:
    """Serialize a plan with its propagated clock times and reliabilities.

    The document lists, per robot, the depot-delimited route string, the mean
    arrival wall-clock time of every visit, and the robot's service
    probability; only the route strings are needed to reload the plan.
    """
    r_all, per_amr = service_probability(plan, inst)
    amr_docs = []
    for k, trips in enumerate(plan.amrs):
        record: list = []
        _amr_walk(trips, inst, record)
        amr_docs.append(
            {
                "route": plan.route_string(k),
                "arrivals": [seconds_to_clock(row[3], inst.t0) for row in record],
                "service_probability": per_amr[k],
            }
        )
    doc = {
        "format": PLAN_FORMAT,
        "instance": inst.label,
        "amrs": amr_docs,
        "service_probability": r_all,
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_plan(text: str) -> Plan:
    """Rebuild a plan from its document; derived fields are recomputed later."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "amrs" not in doc:
        raise ValueError('plan document must be an object with an "amrs" list')
    amrs = []
    for entry in doc["amrs"]:
        if "route" not in entry:
            raise ValueError('plan robot entry is missing "route"')
        amrs.append(Plan.parse_route_string(entry["route"]))
    plan = Plan(amrs)
    plan.validate()
    return plan


def plan_table(plan: Plan, inst: Instance) -> str:
    """Human-readable tab-separated listing: robot, route, arrivals, r."""
    r_all, per_amr = service_probability(plan, inst)
    lines = ["no\troute\tarrival_times\tr"]
    for k in range(plan.m):
        record: list = []
        _amr_walk(plan.amrs[k], inst, record)
        clocks = ",".join(seconds_to_clock(row[3], inst.t0) for row in record)
        lines.append(f"{k + 1}\t{plan.route_string(k)}\t{clocks}\t{per_amr[k]:.6f}")
    lines.append(f"# fleet service probability\t{r_all:.6f}")
    return "\n".join(lines) + "\n"
