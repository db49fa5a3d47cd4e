"""Solve one instance end to end and read the schedule like Table rows.

Greedy insertion opens a robot whenever a request will not fit at the end
of an existing route; the tabu search then consolidates.  The cost weights
dominate everything downstream: a robot costs 30 per day, a missed window
0.1, a second of expected travel 0.01.  So the curve falls in 30-unit
cliffs as robots dissolve, and the search will happily let a request go
certainly late whenever that saves ten seconds of driving.  Reliability is
a statistic of the solution here, not a constraint on it.
"""

from pathlib import Path

from amrsched import (
    SearchParams,
    evaluate,
    extend_instance,
    greedy_insert,
    its_run,
    parse_solomon,
    plan_table,
    service_probability,
)

raw = parse_solomon(Path("data/solomon/RC101.txt").read_text())
inst = extend_instance(raw, period="P3", n=30, seed=5)

start = greedy_insert(inst)
c0 = evaluate(start, inst)
r0, _ = service_probability(start, inst)
print(f"greedy: {start.m} robots, cost {c0.total:.2f} "
      f"(fixed {c0.fixed:.0f} + late {c0.penalty:.2f} + travel {c0.travel:.2f}), r={r0:.3f}")

params = SearchParams(iterations=500, seed=1, scan="sampled", sample_size=30)
res = its_run(inst, params)
c = res.cost
r, per_amr = service_probability(res.plan, inst)
print(f"search: {res.plan.m} robots, cost {c.total:.2f} "
      f"(fixed {c.fixed:.0f} + late {c.penalty:.2f} + travel {c.travel:.2f}), r={r:.3f}")

print(f"\nper-robot reliability after the squeeze: {[round(x, 3) for x in per_amr]}")
print("expected misses cost", f"{c.penalty:.2f},", "less than a tenth of one robot-day")

drops = [
    (it, prev - val)
    for (it, val), (_, prev) in zip(res.curve[1:], res.curve)
    if prev - val > 1.0
]
print(f"{len(drops)} big curve drops:", ", ".join(f"iter {it} (-{d:.0f})" for it, d in drops))

print()
print(plan_table(res.plan, inst))
