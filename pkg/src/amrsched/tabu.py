"""Tabu search with adaptive operator selection.

Each iteration draws one move family by roulette over adaptive weights,
scans that family's pair actions over the current plan, repairs every
candidate with depot reloads, and accepts per classic tabu rules:

* a candidate beating the best-known cost is always accepted (aspiration),
  rewards its operator strongly, and toggles its pair in the operator's tabu
  matrix (to full tenure if free, back to zero if it was tabu);
* otherwise the best non-tabu candidate is accepted, rewarded weakly, its
  pair locked for the full tenure, and the matrix counts down;
* if every candidate is tabu the least-bad one is accepted with tabu
  bookkeeping but no reward, so the search cannot deadlock.

The improving-branch countdown follows the asymmetric published rule by
default (only entries sharing the accepted pair's first request tick down);
``decrement="uniform"`` switches to counting down the whole matrix.

Tabu matrices are kept symmetric with entries in [0, tenure].  Scans are
deterministic given the seed: full scans go row-major over request pairs,
sampled scans draw a fixed-size pair subset and always include the guided
move's pair.

With ``kick_after`` set, a stall of that many iterations without a new best
triggers a perturbation instead of a scan: the leanest robot is emptied
into the rest of the fleet (see ``evacuate_leanest``).  Fleet-size savings
dominate this objective, and that is the one structural move pair scans
cannot compose on their own.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from .construct import greedy_insert
from .instances import Instance
from .operators import (
    OPERATOR_NAMES,
    _repair_trips,
    apply_patch,
    evacuate_leanest,
    pair_patches,
    position_index,
    relocation_star,
    scan_pairs,
    swap_star,
    two_opt_star,
)
from .plans import CostBreakdown, Plan, _amr_walk, evaluate

_GUIDED = {"swap": swap_star, "two_opt": two_opt_star, "relocation": relocation_star}


@dataclass
class SearchParams:
    """Knobs shared by the tabu searches; defaults follow the tuned setup."""

    iterations: int = 500
    tenure: int = 40
    delta1: float = 1.0  # reward when the incumbent best improves
    delta2: float = 0.2  # reward when it does not
    violation_threshold: float = 0.5
    seed: int = 0
    scan: str = "full"  # "full" or "sampled"
    sample_size: int = 150  # pairs per iteration in sampled scans
    kick_after: int = 0  # stalled iterations before a robot is evacuated (0 = never)
    decrement: str = "verbatim"  # "verbatim" or "uniform"
    weight_refresh: int = 10  # iterations between roulette refreshes
    validate_invariants: bool = False  # per-iteration structural checks

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")
        if self.tenure < 1:
            raise ValueError("tenure must be at least 1")
        if not self.delta1 > self.delta2 >= 0:
            raise ValueError("rewards must satisfy delta1 > delta2 >= 0")
        if self.scan not in ("full", "sampled"):
            raise ValueError(f"unknown scan mode {self.scan!r}")
        if self.decrement not in ("verbatim", "uniform"):
            raise ValueError(f"unknown decrement mode {self.decrement!r}")
        if self.sample_size < 1:
            raise ValueError("sample_size must be positive")
        if self.kick_after < 0:
            raise ValueError("kick_after must be nonnegative")
        if self.weight_refresh < 1:
            raise ValueError("weight_refresh must be positive")


@dataclass
class OperatorWeights:
    """Adaptive roulette weights over the three move families."""

    delta1: float = 1.0
    delta2: float = 0.2
    weights: list[float] = field(default_factory=lambda: [1.0, 1.0, 1.0])

    def __post_init__(self) -> None:
        if not self.delta1 > self.delta2 >= 0:
            raise ValueError("rewards must satisfy delta1 > delta2 >= 0")

    def reward(self, op_index: int, improving: bool) -> None:
        self.weights[op_index] += self.delta1 if improving else self.delta2

    def probabilities(self) -> tuple[float, ...]:
        total = sum(self.weights)
        return tuple(w / total for w in self.weights)


def select_operator(probabilities, rng: random.Random) -> int:
    """Roulette draw over operator probabilities."""
    r = rng.random()
    acc = 0.0
    for i, p in enumerate(probabilities):
        acc += p
        if r < acc:
            return i
    return len(probabilities) - 1


def request_pairs(n: int) -> list[tuple[int, int]]:
    """All unordered request pairs in row-major order."""
    return [(j1, j2) for j1 in range(1, n + 1) for j2 in range(j1 + 1, n + 1)]


class TabuState:
    """Three symmetric (n+1) x (n+1) countdown matrices, one per operator."""

    def __init__(self, n: int, tenure: int):
        self.tenure = tenure
        self.mats = [np.zeros((n + 1, n + 1), dtype=np.int32) for _ in OPERATOR_NAMES]

    def is_tabu(self, op_index: int, pair) -> bool:
        return self.mats[op_index][pair[0], pair[1]] != 0

    def toggle(self, op_index: int, pair) -> None:
        """Improving-branch flip: lock a free pair, release a locked one."""
        mat = self.mats[op_index]
        value = self.tenure if mat[pair[0], pair[1]] == 0 else 0
        mat[pair[0], pair[1]] = mat[pair[1], pair[0]] = value

    def lock(self, op_index: int, pair) -> None:
        mat = self.mats[op_index]
        mat[pair[0], pair[1]] = mat[pair[1], pair[0]] = self.tenure

    def decrement_sharing(self, op_index: int, pair) -> None:
        """Tick down entries sharing the pair's first request, pair excluded."""
        j1, j2 = pair
        mat = self.mats[op_index]
        mask = mat[:, j1] > 0
        mask[j2] = False
        mat[mask, j1] -= 1
        mat[j1, mask] -= 1

    def decrement_all(self, op_index: int, pair=None) -> None:
        """Tick down every locked entry; the named pair is spared."""
        mat = self.mats[op_index]
        if pair is None:
            mat[mat > 0] -= 1
            return
        j1, j2 = pair
        keep = mat[j1, j2]
        mat[mat > 0] -= 1
        mat[j1, j2] = mat[j2, j1] = keep

    def check_invariants(self) -> None:
        for mat in self.mats:
            if (mat < 0).any() or (mat > self.tenure).any():
                raise AssertionError("tabu entry out of [0, tenure]")
            if not np.array_equal(mat, mat.T):
                raise AssertionError("tabu matrix lost symmetry")


@dataclass
class SearchResult:
    """Outcome of one search run."""

    plan: Plan
    cost: CostBreakdown
    curve: list[tuple[int, float]]  # (iteration, best total so far)


class PlanState:
    """Nested trip lists plus per-robot cost caches for cheap delta pricing.

    Construction repairs the seed plan for capacity and drops empty robots.
    ``eval_patch`` prices a candidate by rewalking only the robots a patch
    touches; sums run in robot order exactly like ``evaluate`` so the priced
    total matches the canonical cost of the materialized plan bit for bit.
    """

    def __init__(self, inst: Instance, amrs):
        self.inst = inst
        repaired = [
            _repair_trips(trips, inst._demand, inst.capacity) for trips in amrs if trips
        ]
        self.amrs = [trips for trips in repaired if trips]
        self._recompute()

    def _recompute(self) -> None:
        self.per_amr = [_amr_walk(trips, self.inst)[:2] for trips in self.amrs]
        self.f_cur = self._total({})

    def _total(self, patched) -> float:
        inst = self.inst
        late = 0.0
        travel = 0.0
        m = 0
        for a in range(len(self.amrs)):
            if a in patched:
                entry = patched[a]
                if entry is None:
                    continue
                l, t = entry
            else:
                l, t = self.per_amr[a]
            m += 1
            late += l
            travel += t
        return inst.amr_cost * m + inst.late_cost * late + inst.travel_cost * travel

    def eval_patch(self, patch, needs_repair: bool):
        """Repair and price one candidate; returns (total, repaired patch)."""
        inst = self.inst
        repaired = {}
        patched = {}
        for a, trips in patch.items():
            if trips and needs_repair:
                trips = _repair_trips(trips, inst._demand, inst.capacity)
            repaired[a] = trips
            if trips:
                l, t, _ = _amr_walk(trips, inst)
                patched[a] = (l, t)
            else:
                patched[a] = None
        return self._total(patched), repaired

    def accept(self, repaired) -> None:
        """Materialize a repaired patch and refresh the caches."""
        self.amrs = [
            [list(t) for t in trips] for trips in apply_patch(self.amrs, repaired)
        ]
        self._recompute()

    def snapshot(self):
        return [[list(t) for t in trips] for trips in self.amrs]


class _Engine:
    """Shared machinery of the adaptive and the plain tabu search."""

    def __init__(
        self,
        inst: Instance,
        params: SearchParams,
        initial: Plan,
        adaptive: bool,
        rng: random.Random | None = None,
    ):
        self.inst = inst
        self.params = params
        self.adaptive = adaptive
        self.rng = rng if rng is not None else random.Random(params.seed)
        self.weights = OperatorWeights(delta1=params.delta1, delta2=params.delta2)
        self.probs = self.weights.probabilities()
        self.tabu = TabuState(inst.n, params.tenure)
        self.pairs = request_pairs(inst.n)
        self.state = PlanState(inst, initial.amrs)
        self.best_amrs = self.state.snapshot()
        self.f_best = self.state.f_cur
        self.curve = [(0, self.f_best)]
        self.stall = 0

    def _iteration_pairs(self, op_name: str):
        if self.params.scan == "full" or self.params.sample_size >= len(self.pairs):
            return self.pairs
        _, move = _GUIDED[op_name](
            Plan(self.state.amrs), self.inst, self.rng, self.params.violation_threshold
        )
        sampled = scan_pairs(self.state.amrs, self.pairs, self.rng, self.params.sample_size)
        if move.pair is not None and move.pair not in sampled:
            sampled.insert(0, move.pair)
        return sampled

    def _iterate(self, ite: int) -> None:
        if (
            self.params.kick_after
            and self.stall >= self.params.kick_after
            and len(self.state.amrs) > 1
        ):
            # long stall: pair moves cannot free a whole robot, so force
            # the one structural step that still pays and let the scans
            # clean up after it; the incumbent best is kept regardless
            self.state = PlanState(
                self.inst, evacuate_leanest(self.state.amrs, self.inst, self.rng)
            )
            self.stall = 0
            if self.state.f_cur < self.f_best:
                self.f_best = self.state.f_cur
                self.best_amrs = self.state.snapshot()
            self.curve.append((ite, self.f_best))
            self._maybe_refresh(ite)
            return
        op_index = (
            select_operator(self.probs, self.rng)
            if self.adaptive
            else self.rng.randrange(len(OPERATOR_NAMES))
        )
        op_name = OPERATOR_NAMES[op_index]
        state = self.state
        pos = position_index(state.amrs)
        mat = self.tabu.mats[op_index]
        needs_repair = op_name != "two_opt"
        best_any = best_free = best_locked = None
        for pair in self._iteration_pairs(op_name):
            for patch in pair_patches(state.amrs, pos, op_name, pair[0], pair[1]):
                total, repaired = state.eval_patch(patch, needs_repair)
                cand = (total, pair, repaired)
                if best_any is None or total < best_any[0]:
                    best_any = cand
                if mat[pair[0], pair[1]] == 0:
                    if best_free is None or total < best_free[0]:
                        best_free = cand
                elif best_locked is None or total < best_locked[0]:
                    best_locked = cand
        if best_any is None:
            # the operator has no action on this plan shape; the iteration
            # still counts toward the budget
            self.stall += 1
            self.curve.append((ite, self.f_best))
            self._maybe_refresh(ite)
            return
        deadlock = False
        if best_any[0] < self.f_best:
            chosen, improving = best_any, True
        elif best_free is not None:
            chosen, improving = best_free, False
        else:
            chosen, improving = best_locked, False
            deadlock = True
        _, pair, repaired = chosen
        state.accept(repaired)
        if improving:
            self.tabu.toggle(op_index, pair)
            if self.params.decrement == "verbatim":
                self.tabu.decrement_sharing(op_index, pair)
            else:
                self.tabu.decrement_all(op_index, pair)
        else:
            self.tabu.decrement_all(op_index, pair)
            self.tabu.lock(op_index, pair)
        if self.adaptive and not deadlock:
            self.weights.reward(op_index, improving)
        if state.f_cur < self.f_best:
            self.f_best = state.f_cur
            self.best_amrs = state.snapshot()
            self.stall = 0
        else:
            self.stall += 1
        self.curve.append((ite, self.f_best))
        self._maybe_refresh(ite)
        if self.params.validate_invariants:
            self.tabu.check_invariants()
            Plan(state.amrs).validate(self.inst)

    def _maybe_refresh(self, ite: int) -> None:
        if self.adaptive and ite % self.params.weight_refresh == 0:
            self.probs = self.weights.probabilities()

    def run(self) -> SearchResult:
        for ite in range(1, self.params.iterations + 1):
            self._iterate(ite)
        plan = Plan([[list(t) for t in trips] for trips in self.best_amrs])
        return SearchResult(plan=plan, cost=evaluate(plan, self.inst), curve=self.curve)


def its_run(inst: Instance, params: SearchParams | None = None) -> SearchResult:
    """Full solver: greedy start, then adaptive tabu search."""
    params = params if params is not None else SearchParams()
    return _Engine(inst, params, greedy_insert(inst), adaptive=True).run()
