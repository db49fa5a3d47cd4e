"""Comparison solvers: plain tabu search, VNS, and a tiny exact oracle.

The plain tabu search shares the engine of the full solver but starts from a
random plan and picks operators uniformly instead of adaptively.  The VNS
follows the textbook scheme over the same three move families.  The
exhaustive oracle enumerates every assignment of requests to robots and
every ordered trip split, so it certifies global optima on instances small
enough to afford that.
"""

from __future__ import annotations

import itertools
import math
import random

from .instances import Instance
from .operators import OPERATOR_NAMES, pair_patches, position_index, random_move, scan_pairs
from .plans import CostBreakdown, Plan, _amr_walk, evaluate
from .tabu import PlanState, SearchParams, SearchResult, _Engine, request_pairs

EXHAUSTIVE_LIMIT = 8


def random_initial_plan(inst: Instance, rng: random.Random) -> Plan:
    """Random permutation cut greedily into capacity-feasible single trips.

    Each chunk gets its own robot; repair and the search engine take it
    from there.
    """
    perm = list(range(1, inst.n + 1))
    rng.shuffle(perm)
    amrs = []
    trip: list[int] = []
    load = 0.0
    for rid in perm:
        q = inst._demand[rid]
        if trip and load + q > inst.capacity:
            amrs.append([trip])
            trip = []
            load = 0.0
        trip.append(rid)
        load += q
    if trip:
        amrs.append([trip])
    return Plan(amrs)


def plain_ts_run(inst: Instance, params: SearchParams | None = None) -> SearchResult:
    """Tabu search from a random start with uniform operator choice."""
    params = params if params is not None else SearchParams()
    rng = random.Random(params.seed)
    initial = random_initial_plan(inst, rng)
    return _Engine(inst, params, initial, adaptive=False, rng=rng).run()


def _best_neighbor(state: PlanState, op_name: str, pairs, params: SearchParams, rng):
    """Best candidate of one operator's pair scan, or None.

    Obeys the same scan mode as the tabu engine so every solver evaluates
    comparably many candidates per budget unit.
    """
    if params.scan == "sampled":
        pairs = scan_pairs(state.amrs, pairs, rng, params.sample_size)
    pos = position_index(state.amrs)
    needs_repair = op_name != "two_opt"
    best = None
    for j1, j2 in pairs:
        for patch in pair_patches(state.amrs, pos, op_name, j1, j2):
            total, repaired = state.eval_patch(patch, needs_repair)
            if best is None or total < best[0]:
                best = (total, repaired)
    return best


def vns_run(inst: Instance, params: SearchParams | None = None) -> SearchResult:
    """Variable neighborhood search over the three move families.

    Neighborhood k shakes with k random moves of its operator, then runs
    best-improvement descent with that operator's pair scan; k resets to 1
    on improvement and cycles otherwise.  Each descent scan consumes one
    unit of the iteration budget, so the neighborhood-evaluation effort is
    comparable to the tabu searches at equal ``iterations``.
    """
    params = params if params is not None else SearchParams()
    rng = random.Random(params.seed)
    cur = PlanState(inst, random_initial_plan(inst, rng).amrs)
    pairs = request_pairs(inst.n)
    best_amrs = cur.snapshot()
    f_best = cur.f_cur
    curve = [(0, f_best)]
    used = 0
    k = 1
    while used < params.iterations:
        op_name = OPERATOR_NAMES[k - 1]
        shaken = Plan(cur.snapshot())
        for _ in range(k):
            shaken = random_move(shaken, inst, rng, op_name)
        trial = PlanState(inst, shaken.amrs)
        while used < params.iterations:
            used += 1
            cand = _best_neighbor(trial, op_name, pairs, params, rng)
            if cand is not None and cand[0] < trial.f_cur:
                trial.accept(cand[1])
                if trial.f_cur < f_best:
                    f_best = trial.f_cur
                    best_amrs = trial.snapshot()
                curve.append((used, f_best))
            else:
                curve.append((used, f_best))
                break
        if trial.f_cur < cur.f_cur:
            cur = trial
            k = 1
        else:
            k = k % len(OPERATOR_NAMES) + 1
    plan = Plan(best_amrs)
    return SearchResult(plan=plan, cost=evaluate(plan, inst), curve=curve)


def _robot_cost(trips, inst: Instance) -> float:
    late, travel, _ = _amr_walk(trips, inst)
    return inst.amr_cost + inst.late_cost * late + inst.travel_cost * travel


def _best_single_robot(ids, inst: Instance):
    """Cheapest (cost, trips) serving exactly these requests with one robot.

    Tries every visiting order and every way of splitting it into depot
    returns; splits that overload a trip are discarded.
    """
    demand = inst._demand
    capacity = inst.capacity
    best_cost = math.inf
    best_trips = None
    k = len(ids)
    for perm in itertools.permutations(ids):
        for cut_mask in range(1 << (k - 1)):
            trips = []
            trip = [perm[0]]
            load = demand[perm[0]]
            feasible = True
            for i in range(1, k):
                if cut_mask >> (i - 1) & 1:
                    trips.append(trip)
                    trip = []
                    load = 0.0
                load += demand[perm[i]]
                if load > capacity:
                    feasible = False
                    break
                trip.append(perm[i])
            if not feasible:
                continue
            trips.append(trip)
            cost = _robot_cost(trips, inst)
            if cost < best_cost:
                best_cost = cost
                best_trips = trips
    return best_cost, best_trips


def exhaustive_solve(inst: Instance) -> tuple[Plan, CostBreakdown]:
    """Globally optimal plan by enumerating all robot assignments and orders.

    Every subset of requests is priced as a single robot's best multi-trip
    route, then a partition DP picks the cheapest way to cover all requests.
    Refuses instances beyond EXHAUSTIVE_LIMIT requests: the enumeration is
    factorial.
    """
    n = inst.n
    if n > EXHAUSTIVE_LIMIT:
        raise ValueError(
            f"exhaustive search is capped at {EXHAUSTIVE_LIMIT} requests, got {n}"
        )
    ids = list(range(1, n + 1))
    subset_cost = {}
    subset_trips = {}
    for mask in range(1, 1 << n):
        members = [ids[i] for i in range(n) if mask >> i & 1]
        subset_cost[mask], subset_trips[mask] = _best_single_robot(members, inst)
    full = (1 << n) - 1
    best = [math.inf] * (full + 1)
    choice = [0] * (full + 1)
    best[0] = 0.0
    for mask in range(1, full + 1):
        low = mask & -mask
        sub = mask
        while sub:
            # only submasks holding the lowest set bit: each partition is
            # enumerated once, anchored by its smallest request
            if sub & low:
                total = subset_cost[sub] + best[mask ^ sub]
                if total < best[mask]:
                    best[mask] = total
                    choice[mask] = sub
            sub = (sub - 1) & mask
    amrs = []
    mask = full
    while mask:
        sub = choice[mask]
        amrs.append([list(t) for t in subset_trips[sub]])
        mask ^= sub
    plan = Plan(amrs)
    return plan, evaluate(plan, inst)
