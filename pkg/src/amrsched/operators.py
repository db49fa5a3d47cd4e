"""Neighborhood moves: guided operators, pair actions, and capacity repair.

Three move families drive the search, each usable two ways:

* the guided single-move functions (``swap_star`` and friends) look at the
  current schedule, pick a deadline-violating request, and fix the most
  telling flaw (swap with a laxer earlier request, straighten a
  descending-window run, reinsert before a later-window request), falling
  back to a seeded random move when nothing violates;
* the pair-action patches (``pair_patches``) realize the same families as
  actions indexed by a request pair (j1, j2), which is what the tabu scan
  and the descent enumerate exhaustively.

``repair_depot_insertion`` restores capacity feasibility by splitting trips
at the first overload, i.e. sending the robot home for a reload; it never
adds robots and is idempotent.

All moves preserve request uniqueness and never retain empty trips or robots.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .instances import Instance
from .plans import EPS, Plan, _amr_walk

OPERATOR_NAMES = ("swap", "two_opt", "relocation")

DEFAULT_VIOLATION_THRESHOLD = 0.5


@dataclass(frozen=True)
class Move:
    """One applied action: the family plus the unordered request pair.

    ``pair`` is ``None`` for degenerate no-effect moves (e.g. reversing when
    no trip has two requests).
    """

    op: str
    pair: tuple[int, int] | None

    def __post_init__(self) -> None:
        if self.op not in OPERATOR_NAMES:
            raise ValueError(f"unknown operator {self.op!r}")
        if self.pair is not None:
            j1, j2 = self.pair
            if j1 == j2:
                raise ValueError("move pair must name two different requests")
            if j1 > j2:
                object.__setattr__(self, "pair", (j2, j1))


def position_index(amrs) -> dict[int, tuple[int, int, int]]:
    """request id -> (robot, trip, position) for nested trip lists."""
    pos = {}
    for a, trips in enumerate(amrs):
        for t, trip in enumerate(trips):
            for i, rid in enumerate(trip):
                pos[rid] = (a, t, i)
    return pos


def violating_requests(plan: Plan, inst: Instance, threshold: float = DEFAULT_VIOLATION_THRESHOLD):
    """Requests whose miss probability exceeds the threshold, worst first.

    With the default 0.5 threshold this is the deterministic reading "mean
    arrival past the deadline".  Ties break toward the smaller id so guided
    moves stay reproducible.
    """
    out = []
    for trips in plan.amrs:
        record: list = []
        _amr_walk(trips, inst, record)
        for row in record:
            if row[8] > threshold:
                out.append((row[8], row[0]))
    out.sort(key=lambda pair: (-pair[0], pair[1]))
    return out


def _repair_trips(trips, demand, capacity):
    """Split trips left to right whenever the running load would overflow."""
    out = []
    for trip in trips:
        cur: list = []
        load = 0.0
        for rid in trip:
            if cur and load + demand[rid] > capacity + EPS:
                out.append(cur)
                cur = []
                load = 0.0
            cur.append(rid)
            load += demand[rid]
        if cur:
            out.append(cur)
    return out


def repair_depot_insertion(plan: Plan, inst: Instance) -> Plan:
    """Capacity-feasible copy of the plan via depot reload insertions."""
    repaired = []
    for trips in plan.amrs:
        new_trips = _repair_trips(trips, inst._demand, inst.capacity)
        if new_trips:
            repaired.append(new_trips)
    return Plan(repaired)


def swap_star(
    plan: Plan,
    inst: Instance,
    rng: random.Random,
    threshold: float = DEFAULT_VIOLATION_THRESHOLD,
) -> tuple[Plan, Move]:
    """Exchange a violating request with a laxer request served before it.

    The worst violator is swapped with the largest-deadline request among
    those earlier in its own trip whose deadline is strictly later than the
    violator's.  Without such a configuration the move degrades to swapping a
    uniformly random request pair.
    """
    pos = position_index(plan.amrs)
    due = inst._due
    for _, v in violating_requests(plan, inst, threshold):
        a, t, i = pos[v]
        trip = plan.amrs[a][t]
        earlier = [u for u in trip[:i] if due[u] > due[v]]
        if earlier:
            u = max(earlier, key=lambda r: due[r])
            return _swapped(plan, pos, v, u), Move("swap", (v, u))
    ids = sorted(pos)
    if len(ids) < 2:
        return plan.copy(), Move("swap", None)
    j1, j2 = rng.sample(ids, 2)
    return _swapped(plan, pos, j1, j2), Move("swap", (j1, j2))


def _swapped(plan: Plan, pos, j1, j2) -> Plan:
    out = plan.copy()
    a1, t1, i1 = pos[j1]
    a2, t2, i2 = pos[j2]
    out.amrs[a1][t1][i1], out.amrs[a2][t2][i2] = j2, j1
    return out


def two_opt_star(
    plan: Plan,
    inst: Instance,
    rng: random.Random,
    threshold: float = DEFAULT_VIOLATION_THRESHOLD,
) -> tuple[Plan, Move]:
    """Reverse a descending-window run inside one trip.

    Serving strictly decreasing window openings back to back is provably
    wasteful, so the first maximal run of that shape gets reversed.  With no
    such run, a random segment of a random multi-request trip is reversed;
    with no such trip the plan is returned unchanged.
    """
    ready = inst._ready
    for a, trips in enumerate(plan.amrs):
        for t, trip in enumerate(trips):
            i = 0
            while i < len(trip) - 1:
                if ready[trip[i]] > ready[trip[i + 1]]:
                    j = i + 1
                    while j + 1 < len(trip) and ready[trip[j]] > ready[trip[j + 1]]:
                        j += 1
                    return _reversed_segment(plan, a, t, i, j), Move(
                        "two_opt", (trip[i], trip[j])
                    )
                i += 1
    candidates = [
        (a, t)
        for a, trips in enumerate(plan.amrs)
        for t, trip in enumerate(trips)
        if len(trip) >= 2
    ]
    if not candidates:
        return plan.copy(), Move("two_opt", None)
    a, t = candidates[rng.randrange(len(candidates))]
    i, j = sorted(rng.sample(range(len(plan.amrs[a][t])), 2))
    trip = plan.amrs[a][t]
    return _reversed_segment(plan, a, t, i, j), Move("two_opt", (trip[i], trip[j]))


def _reversed_segment(plan: Plan, a, t, i, j) -> Plan:
    out = plan.copy()
    trip = out.amrs[a][t]
    trip[i : j + 1] = reversed(trip[i : j + 1])
    return out


def relocation_star(
    plan: Plan,
    inst: Instance,
    rng: random.Random,
    threshold: float = DEFAULT_VIOLATION_THRESHOLD,
) -> tuple[Plan, Move]:
    """Pull a violating request forward, in front of a later-window request.

    The worst violator is reinserted immediately before the first request in
    robot-trip-position order whose deadline is strictly later; the jump may
    cross trips and robots.  Without violators a random request moves to a
    random slot.  Robots left empty disappear.
    """
    pos = position_index(plan.amrs)
    due = inst._due
    order = [rid for trips in plan.amrs for trip in trips for rid in trip]
    for _, v in violating_requests(plan, inst, threshold):
        target = next((u for u in order if u != v and due[u] > due[v]), None)
        if target is not None:
            return _relocated_before(plan, v, target), Move("relocation", (v, target))
    ids = sorted(pos)
    if len(ids) < 2:
        return plan.copy(), Move("relocation", None)
    v = ids[rng.randrange(len(ids))]
    out = plan.copy()
    _pop_request(out, v)
    slots = [
        (a, t, p)
        for a, trips in enumerate(out.amrs)
        for t, trip in enumerate(trips)
        for p in range(len(trip) + 1)
    ]
    a, t, p = slots[rng.randrange(len(slots))]
    out.amrs[a][t].insert(p, v)
    follower = out.amrs[a][t][p + 1] if p + 1 < len(out.amrs[a][t]) else out.amrs[a][t][p - 1]
    return out, Move("relocation", (v, follower))


def _relocated_before(plan: Plan, mover, target) -> Plan:
    out = plan.copy()
    _pop_request(out, mover)
    a, t, i = position_index(out.amrs)[target]
    out.amrs[a][t].insert(i, mover)
    return out


def _pop_request(plan: Plan, rid) -> None:
    """Remove a request in place, dropping any trip or robot left empty."""
    a, t, i = position_index(plan.amrs)[rid]
    trip = plan.amrs[a][t]
    del trip[i]
    if not trip:
        del plan.amrs[a][t]
        if not plan.amrs[a]:
            del plan.amrs[a]


def random_move(plan: Plan, inst: Instance, rng: random.Random, op: str) -> Plan:
    """The unguided variant of one operator, for shaking."""
    pos = position_index(plan.amrs)
    ids = sorted(pos)
    if op == "swap":
        if len(ids) < 2:
            return plan.copy()
        j1, j2 = rng.sample(ids, 2)
        return _swapped(plan, pos, j1, j2)
    if op == "two_opt":
        candidates = [
            (a, t)
            for a, trips in enumerate(plan.amrs)
            for t, trip in enumerate(trips)
            if len(trip) >= 2
        ]
        if not candidates:
            return plan.copy()
        a, t = candidates[rng.randrange(len(candidates))]
        i, j = sorted(rng.sample(range(len(plan.amrs[a][t])), 2))
        return _reversed_segment(plan, a, t, i, j)
    if op == "relocation":
        if len(ids) < 2:
            return plan.copy()
        v = ids[rng.randrange(len(ids))]
        out = plan.copy()
        _pop_request(out, v)
        slots = [
            (a, t, p)
            for a, trips in enumerate(out.amrs)
            for t, trip in enumerate(trips)
            for p in range(len(trip) + 1)
        ]
        a, t, p = slots[rng.randrange(len(slots))]
        out.amrs[a][t].insert(p, v)
        return out
    raise ValueError(f"unknown operator {op!r}")


def _robot_sizes(amrs) -> dict[int, int]:
    """request id -> number of requests on its robot."""
    size = {}
    for trips in amrs:
        s = sum(len(t) for t in trips)
        for trip in trips:
            for rid in trip:
                size[rid] = s
    return size


def scan_pairs(amrs, pairs, rng: random.Random, k: int):
    """Sample up to k candidate pairs, favoring requests on lean robots.

    Emptying a robot is the one large win a scan can set up, so pairs
    touching robots with few requests are drawn more often (granular
    candidate-list style).  Duplicates from the weighted draw are dropped,
    so slightly fewer than k pairs may come back.
    """
    if k >= len(pairs):
        return list(pairs)
    size = _robot_sizes(amrs)
    # squared so a near-empty robot draws the scan hard toward finishing it
    weights = [(1.0 / size[j1] + 1.0 / size[j2]) ** 2 for j1, j2 in pairs]
    return list(dict.fromkeys(rng.choices(pairs, weights=weights, k=k)))


def evacuate_leanest(amrs, inst: Instance, rng: random.Random):
    """Empty the robot with the fewest requests into the rest of the fleet.

    Pair moves shift one request at a time, so the search can almost never
    compose the long relocation chain that frees a whole robot; this does
    it in one step.  Each evicted request (in window order) lands at the
    end of the capacity-feasible trip with the cheapest added travel, or
    opens a fresh trip on the least-loaded robot when nothing fits.  Legs
    are priced with the first speed zone's means; that is only a seeding
    heuristic, the search re-prices exactly afterwards.  Ties between
    equally lean robots are broken by the caller's rng, so runs stay
    reproducible.  A single-robot fleet comes back unchanged.
    """
    if len(amrs) < 2:
        return [[list(t) for t in trips] for trips in amrs]
    sizes = [sum(len(t) for t in trips) for trips in amrs]
    smallest = min(sizes)
    donor = rng.choice([a for a, s in enumerate(sizes) if s == smallest])
    rest = [[list(t) for t in trips] for a, trips in enumerate(amrs) if a != donor]
    evicted = sorted(
        (rid for trip in amrs[donor] for rid in trip),
        key=lambda rid: (inst._ready[rid], rid),
    )
    mu = inst._mu_t[0]
    demand = inst._demand
    loads = [[sum(demand[r] for r in trip) for trip in trips] for trips in rest]
    for rid in evicted:
        q = demand[rid]
        best = None
        for a, trips in enumerate(rest):
            for t, trip in enumerate(trips):
                if loads[a][t] + q > inst.capacity + EPS:
                    continue
                delta = mu[trip[-1]][rid]
                if best is None or delta < best[0]:
                    best = (delta, a, t)
        if best is None:
            a = min(range(len(rest)), key=lambda a: sum(loads[a]))
            rest[a].append([rid])
            loads[a].append(q)
        else:
            _, a, t = best
            rest[a][t].append(rid)
            loads[a][t] += q
    return rest


def pair_patches(amrs, pos, op: str, j1: int, j2: int):
    """Candidate patches for the pair action (op, j1, j2) on nested trip lists.

    A patch maps robot index -> replacement trip list (possibly empty when
    the robot dissolves).  Swap and reversal give one candidate; relocation
    gives one per direction.  Pairs the operator cannot act on (reversal
    across trips, adjacent relocations) yield no patches.  Input lists are
    never mutated.
    """
    if op == "swap":
        a1, t1, i1 = pos[j1]
        a2, t2, i2 = pos[j2]
        if a1 == a2:
            trips = [list(t) for t in amrs[a1]]
            trips[t1][i1], trips[t2][i2] = j2, j1
            return [{a1: trips}]
        trips1 = [list(t) for t in amrs[a1]]
        trips2 = [list(t) for t in amrs[a2]]
        trips1[t1][i1] = j2
        trips2[t2][i2] = j1
        return [{a1: trips1, a2: trips2}]
    if op == "two_opt":
        a1, t1, i1 = pos[j1]
        a2, t2, i2 = pos[j2]
        if a1 != a2 or t1 != t2:
            return []
        lo, hi = (i1, i2) if i1 < i2 else (i2, i1)
        trips = [list(t) for t in amrs[a1]]
        trips[t1][lo : hi + 1] = reversed(trips[t1][lo : hi + 1])
        return [{a1: trips}]
    if op == "relocation":
        patches = []
        for mover, target in ((j1, j2), (j2, j1)):
            patch = _relocation_patch(amrs, pos, mover, target)
            if patch is not None:
                patches.append(patch)
        return patches
    raise ValueError(f"unknown operator {op!r}")


def apply_patch(amrs, patch):
    """Nested trip lists with patched robots replaced and dissolved ones dropped.

    Unpatched robots are shared, not copied; callers own the copies inside
    the patch, so the result must be deep-copied before any in-place edit.
    """
    out = []
    for a, trips in enumerate(amrs):
        if a in patch:
            if patch[a]:
                out.append(patch[a])
        else:
            out.append(trips)
    return out


def _relocation_patch(amrs, pos, mover, target):
    a1, t1, i1 = pos[mover]
    a2, t2, i2 = pos[target]
    if a1 == a2 and t1 == t2 and i2 == i1 + 1:
        return None  # already immediately before the target
    if a1 == a2:
        trips = [list(t) for t in amrs[a1]]
        del trips[t1][i1]
        if t1 == t2 and i1 < i2:
            i2 -= 1
        trips[t2].insert(i2, mover)
        if not trips[t1]:
            del trips[t1]
        return {a1: trips}
    trips1 = [list(t) for t in amrs[a1]]
    trips2 = [list(t) for t in amrs[a2]]
    del trips1[t1][i1]
    if not trips1[t1]:
        del trips1[t1]
    trips2[t2].insert(i2, mover)
    return {a1: trips1, a2: trips2}
