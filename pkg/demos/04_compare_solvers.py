"""Race the four solvers on one instance across several seeds.

All three searches spend the same budget: 500 scans of one operator family
each.  The interesting column is the gap G' against the adaptive tabu
search; positive means the adaptive search won.  Expect small gaps between
the searches and a large one against greedy, whose fleet the searches
spend their whole budget dissolving.
"""

from pathlib import Path
from statistics import fmean

from amrsched import (
    SearchParams,
    evaluate,
    extend_instance,
    greedy_insert,
    its_run,
    parse_solomon,
    plain_ts_run,
    vns_run,
)

raw = parse_solomon(Path("data/solomon/C108.txt").read_text())
inst = extend_instance(raw, period="P3", n=50, seed=0)
print(f"instance {inst.label}, capacity {inst.capacity:.0f}\n")

seeds = range(5)
cfg = dict(scan="sampled", sample_size=30, kick_after=15, kick_width=4)

f_greedy = evaluate(greedy_insert(inst), inst).total
runs = {"its": [], "ts": [], "vns": []}
for s in seeds:
    runs["its"].append(its_run(inst, SearchParams(seed=s, **cfg)).cost.total)
    runs["ts"].append(plain_ts_run(inst, SearchParams(seed=s, **cfg)).cost.total)
    runs["vns"].append(vns_run(inst, SearchParams(seed=s, **cfg)).cost.total)

f_its = fmean(runs["its"])
print(f"{'solver':8s} {'mean':>9s} {'best':>9s} {'G% vs adaptive':>15s}")
print(f"{'its':8s} {f_its:9.2f} {min(runs['its']):9.2f} {0.0:15.2f}")
for name in ("ts", "vns"):
    f = fmean(runs[name])
    print(f"{name:8s} {f:9.2f} {min(runs[name]):9.2f} {100 * (f - f_its) / f:15.2f}")
print(f"{'greedy':8s} {f_greedy:9.2f} {f_greedy:9.2f} {100 * (f_greedy - f_its) / f_greedy:15.2f}")
