import itertools
import random

import pytest

from amrsched.baselines import (
    EXHAUSTIVE_LIMIT,
    exhaustive_solve,
    plain_ts_run,
    random_initial_plan,
    vns_run,
)
from amrsched.benchgen import make_base_text
from amrsched.construct import greedy_insert
from amrsched.instances import extend_instance, parse_solomon, zero_variance_copy
from amrsched.plans import Plan, capacity_violations, evaluate
from amrsched.tabu import SearchParams, its_run


def small_instance(n, base="R101", period="P1", seed=4, deterministic=False):
    raw = parse_solomon(make_base_text(base))
    inst = extend_instance(raw, period=period, n=n, seed=seed)
    return zero_variance_copy(inst) if deterministic else inst


# --- random initialization ---


def test_random_initial_plan_structure():
    inst = small_instance(25)
    plan = random_initial_plan(inst, random.Random(3))
    plan.validate(inst)
    assert sorted(plan.all_requests()) == list(range(1, 26))
    for trips in plan.amrs:
        assert len(trips) == 1  # one trip per robot before any search
        assert sum(inst._demand[r] for r in trips[0]) <= inst.capacity


def test_random_initial_plan_seeding():
    inst = small_instance(25)
    a = random_initial_plan(inst, random.Random(3))
    b = random_initial_plan(inst, random.Random(3))
    c = random_initial_plan(inst, random.Random(4))
    assert a.amrs == b.amrs
    assert a.amrs != c.amrs


# --- plain tabu search ---


def test_plain_ts_zero_iterations_returns_random_start():
    inst = small_instance(15)
    res = plain_ts_run(inst, SearchParams(iterations=0, seed=5))
    expected = evaluate(random_initial_plan(inst, random.Random(5)), inst)
    assert res.cost == expected


def test_plain_ts_deterministic_and_improving():
    inst = small_instance(15)
    p = SearchParams(iterations=40, seed=2)
    a = plain_ts_run(inst, p)
    b = plain_ts_run(inst, p)
    assert a.cost == b.cost and a.plan.amrs == b.plan.amrs and a.curve == b.curve
    start = evaluate(random_initial_plan(inst, random.Random(2)), inst).total
    assert a.cost.total <= start + 1e-9
    values = [v for _, v in a.curve]
    assert all(x >= y for x, y in zip(values, values[1:]))
    a.plan.validate(inst)


# --- VNS ---


def test_vns_deterministic_and_improving():
    inst = small_instance(15)
    p = SearchParams(iterations=30, seed=7)
    a = vns_run(inst, p)
    b = vns_run(inst, p)
    assert a.cost == b.cost and a.plan.amrs == b.plan.amrs and a.curve == b.curve
    assert len(a.curve) == 31
    values = [v for _, v in a.curve]
    assert all(x >= y for x, y in zip(values, values[1:]))
    assert a.curve[-1][1] == a.cost.total
    a.plan.validate(inst)
    assert sorted(a.plan.all_requests()) == list(range(1, 16))


def test_single_request_all_solvers_agree():
    inst = small_instance(1)
    p = SearchParams(iterations=10, seed=0)
    totals = {
        its_run(inst, p).cost.total,
        plain_ts_run(inst, p).cost.total,
        vns_run(inst, p).cost.total,
        evaluate(greedy_insert(inst), inst).total,
        exhaustive_solve(inst)[1].total,
    }
    assert len(totals) == 1


# --- exhaustive oracle ---


def test_exhaustive_refuses_large_instances():
    inst = small_instance(EXHAUSTIVE_LIMIT + 1)
    with pytest.raises(ValueError):
        exhaustive_solve(inst)


def test_exhaustive_single_request_cost():
    inst = small_instance(1, deterministic=True)
    plan, cost = exhaustive_solve(inst)
    assert plan.amrs == [[[1]]]
    out = inst.travel_time(0, 1, 0.0).mean
    back = inst.travel_time(1, 0, out).mean
    assert cost.fixed == inst.amr_cost
    assert cost.travel == pytest.approx(inst.travel_cost * (out + back), rel=1e-12)


def _enumerate_two_request_plans(inst):
    # every structurally distinct plan for 2 requests: shared robot with one
    # or two trips (both orders), or one robot each
    shapes = [
        [[[1, 2]]],
        [[[2, 1]]],
        [[[1], [2]]],
        [[[2], [1]]],
        [[[1]], [[2]]],
    ]
    return min(evaluate(Plan(s), inst).total for s in shapes)


def test_exhaustive_two_requests_matches_manual_enumeration():
    inst = small_instance(2, deterministic=True)
    plan, cost = exhaustive_solve(inst)
    assert cost.total == pytest.approx(_enumerate_two_request_plans(inst), abs=1e-9)
    assert plan.m == 1  # a second robot costs far more than any penalty


def test_exhaustive_beats_all_heuristics():
    p = SearchParams(iterations=80, seed=1)
    for seed in (11, 12, 13):
        inst = small_instance(6, seed=seed, deterministic=True)
        _, cost = exhaustive_solve(inst)
        for res_total in (
            its_run(inst, p).cost.total,
            plain_ts_run(inst, p).cost.total,
            vns_run(inst, p).cost.total,
            evaluate(greedy_insert(inst), inst).total,
        ):
            assert cost.total <= res_total + 1e-9


def test_exhaustive_matches_brute_force_partitions():
    # independent check of the subset DP: enumerate robot partitions directly
    inst = small_instance(4, deterministic=True)
    _, cost = exhaustive_solve(inst)

    ids = [1, 2, 3, 4]
    best = float("inf")

    def partitions(rest):
        if not rest:
            yield []
            return
        first = rest[0]
        for sub_mask in range(1 << (len(rest) - 1)):
            group = [first] + [
                rest[i + 1] for i in range(len(rest) - 1) if sub_mask >> i & 1
            ]
            remaining = [r for r in rest[1:] if r not in group]
            for tail in partitions(remaining):
                yield [group] + tail

    def robot_options(group):
        for perm in itertools.permutations(group):
            for cuts in range(1 << (len(perm) - 1)):
                trips = [[perm[0]]]
                for i in range(1, len(perm)):
                    if cuts >> (i - 1) & 1:
                        trips.append([])
                    trips[-1].append(perm[i])
                yield trips

    for part in partitions(ids):
        for combo in itertools.product(*(robot_options(g) for g in part)):
            plan = Plan([list(c) for c in combo])
            if capacity_violations(plan, inst):
                continue
            total = evaluate(plan, inst).total
            if total < best:
                best = total

    assert cost.total == pytest.approx(best, abs=1e-9)


def test_its_reaches_exhaustive_optimum_on_toy():
    inst = small_instance(6, seed=21, deterministic=True)
    _, exact = exhaustive_solve(inst)
    best = min(
        its_run(inst, SearchParams(iterations=120, seed=s)).cost.total
        for s in range(10)
    )
    assert best <= exact.total * 1.02 + 1e-9
    assert best >= exact.total - 1e-9
