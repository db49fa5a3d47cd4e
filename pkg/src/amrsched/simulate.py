"""Monte Carlo validation of the analytic schedule model.

Replays a plan under random robot speeds, elevator speeds, and service
durations drawn from the instance distributions, and aggregates lateness
frequencies against the analytic window-miss probabilities.  One speed pair
is drawn per leg and one duration per visit; negative draws are truncated
at zero, which the Gaussian model formally admits but hardware does not.

Sampling runs in fixed-size chunks with seeds spawned from the master seed,
and per-chunk sums are combined with compensated summation, so the result
is identical no matter how the chunks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instances import Instance
from .plans import CostBreakdown, Plan, propagate, service_probability

_CHUNK = 20_000


@dataclass(frozen=True)
class SimulationReport:
    """Empirical aggregates over all samples of one plan replay."""

    samples: int
    late_frequency: dict[int, float]  # request id -> empirical P(A > h)
    per_amr_service: list[float]  # min on-time frequency per robot
    service_probability: float  # weakest robot
    mean_travel: float  # mean realized travel seconds per day
    cost: CostBreakdown  # empirical daily cost


def _chunk_sizes(samples: int) -> list[int]:
    sizes = [_CHUNK] * (samples // _CHUNK)
    if samples % _CHUNK:
        sizes.append(samples % _CHUNK)
    return sizes


def _replay_chunk(plan: Plan, inst: Instance, rng, size: int):
    """One vectorized replay; returns (late counts per visit, travel sum)."""
    zone_starts = np.asarray(inst._zone_starts)
    mu_travel = np.asarray([z.travel_mean for z in inst.profile.zones])
    mu_floor = np.asarray([z.floor_mean for z in inst.profile.zones])
    sd_travel = math.sqrt(inst.profile.travel_variance)
    sd_floor = math.sqrt(inst.profile.floor_variance)
    last_zone = len(zone_starts) - 1

    def leg_time(prev, rid, now):
        d, f = inst.distance(prev, rid)
        zi = np.clip(np.searchsorted(zone_starts, now, side="right") - 1, 0, last_zone)
        vr = np.maximum(rng.normal(mu_travel[zi], sd_travel), 0.0)
        vf = np.maximum(rng.normal(mu_floor[zi], sd_floor), 0.0)
        return d * vr + abs(f) * vf

    late_counts = []
    travel = np.zeros(size)
    for trips in plan.amrs:
        now = np.zeros(size)
        for trip in trips:
            prev = 0
            for rid in trip:
                t = leg_time(prev, rid, now)
                travel += t
                arrival = now + t
                late_counts.append(int((arrival > inst._due[rid]).sum()))
                start = np.maximum(arrival, inst._ready[rid])
                service = np.maximum(
                    rng.normal(inst._smean[rid], math.sqrt(inst._svar[rid])), 0.0
                )
                now = start + service
                prev = rid
            t = leg_time(prev, 0, now)
            travel += t
            now = now + t
    return late_counts, float(travel.sum())


def simulate_plan(
    plan: Plan, inst: Instance, samples: int, seed: int = 0
) -> SimulationReport:
    """Empirical lateness, service probability, and cost of a plan."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    plan.validate(inst)
    sizes = _chunk_sizes(samples)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    late_sums = None
    travel_parts = []
    for size, ss in zip(sizes, seeds):
        counts, travel = _replay_chunk(plan, inst, np.random.default_rng(ss), size)
        travel_parts.append(travel)
        if late_sums is None:
            late_sums = counts
        else:
            late_sums = [a + b for a, b in zip(late_sums, counts)]
    mean_travel = math.fsum(travel_parts) / samples

    freqs = [c / samples for c in late_sums]
    late_frequency = {}
    per_amr = []
    i = 0
    for trips in plan.amrs:
        worst = 0.0
        for trip in trips:
            for rid in trip:
                late_frequency[rid] = freqs[i]
                worst = max(worst, freqs[i])
                i += 1
        per_amr.append(1.0 - worst)
    cost = CostBreakdown(
        fixed=inst.amr_cost * plan.m,
        penalty=inst.late_cost * math.fsum(freqs),
        travel=inst.travel_cost * mean_travel,
    )
    return SimulationReport(
        samples=samples,
        late_frequency=late_frequency,
        per_amr_service=per_amr,
        service_probability=min(per_amr) if per_amr else 1.0,
        mean_travel=mean_travel,
        cost=cost,
    )


def comparison_text(
    plan: Plan,
    inst: Instance,
    report: SimulationReport,
    tolerance: float = 0.02,
) -> str:
    """Analytic-vs-empirical table for diffing, one row per visit."""
    schedule = propagate(plan, inst)
    lines = [
        "request\tamr\tanalytic_late\tempirical_late\tgap\tverdict",
    ]
    worst = 0.0
    for visit in schedule.visits:
        emp = report.late_frequency[visit.request_id]
        gap = abs(emp - visit.late_probability)
        worst = max(worst, gap)
        lines.append(
            f"{visit.request_id}\t{visit.amr}\t{visit.late_probability:.6f}"
            f"\t{emp:.6f}\t{gap:.6f}\t{'pass' if gap <= tolerance else 'FAIL'}"
        )
    analytic_r, _ = service_probability(plan, inst)
    lines.append("")
    lines.append(f"analytic_r\t{analytic_r:.6f}")
    lines.append(f"empirical_r\t{report.service_probability:.6f}")
    r_gap = abs(analytic_r - report.service_probability)
    lines.append(f"r_gap\t{r_gap:.6f}\t{'pass' if r_gap <= tolerance else 'FAIL'}")
    lines.append(f"max_visit_gap\t{worst:.6f}\t{'pass' if worst <= tolerance else 'FAIL'}")
    lines.append(f"samples\t{report.samples}")
    return "\n".join(lines) + "\n"
