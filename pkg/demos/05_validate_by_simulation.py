"""Does the analytic schedule survive contact with random draws?

The solver never samples anything: every arrival distribution comes from
the moment-matched max() chain.  A brute-force replay of the same plan,
drawing every leg and service time, shows where that approximation is
trustworthy and where it drifts.  The short answer: gaps scale with how
hard the max() clips.  A plan that mostly waits for window openings or
mostly runs late keeps compounding small shape errors; a plan with slack
reproduces the replay to three decimals.
"""

from pathlib import Path

from amrsched import (
    SearchParams,
    extend_instance,
    greedy_insert,
    its_run,
    parse_solomon,
    propagate,
    service_probability,
    simulate_plan,
)

raw = parse_solomon(Path("data/solomon/R202.txt").read_text())
inst = extend_instance(raw, period="P2", n=15, seed=11)

plans = {
    "greedy (on time)": greedy_insert(inst),
    "searched (squeezed)": its_run(
        inst, SearchParams(iterations=200, seed=2, scan="sampled", sample_size=40)
    ).plan,
}

for label, plan in plans.items():
    report = simulate_plan(plan, inst, samples=100_000, seed=99)
    r_analytic, _ = service_probability(plan, inst)
    schedule = propagate(plan, inst)
    gaps = {
        v.request_id: abs(report.late_frequency[v.request_id] - v.late_probability)
        for v in schedule.visits
    }
    worst = max(gaps, key=gaps.get)
    total_analytic = sum(v.late_probability for v in schedule.visits)
    total_empirical = sum(report.late_frequency.values())
    print(f"{label}: {plan.m} robots")
    print(f"  r analytic {r_analytic:.4f} vs empirical {report.service_probability:.4f}")
    print(f"  lateness sum {total_analytic:.4f} vs {total_empirical:.4f}")
    print(f"  worst per-visit gap {gaps[worst]:.4f} (request {worst})")
    print()

print("the squeezed plan clips every visit, so single-visit gaps creep toward")
print("a few hundredths; the fleet-level r still agrees because min() lands")
print("on a visit that is late with certainty either way")
