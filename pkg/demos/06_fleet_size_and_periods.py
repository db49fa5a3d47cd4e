"""What drives fleet size: window width and the time of day.

Two regularities worth seeing once with your own eyes:

* narrow-window bases need more robots than their wide-window twins,
  because a robot can only chain requests whose windows it can reach in
  sequence -- with wide windows one robot can do almost everything;
* the morning peak (slowest speeds) needs at least as many robots as
  off-peak on the same base, since every leg stretches.

Greedy construction already shows both trends; the searched fleets keep
them while shrinking everything.
"""

from pathlib import Path

from amrsched import SearchParams, extend_instance, greedy_insert, its_run, parse_solomon

PAIRS = [("C108", "C208"), ("R101", "R202"), ("RC101", "RC202")]
cfg = dict(iterations=300, scan="sampled", sample_size=30, kick_after=15, kick_width=4)

print(f"{'base':7s} {'greedy P1':>10s} {'greedy P3':>10s} {'its P1':>8s} {'its P3':>8s}")
for narrow, wide in PAIRS:
    for name in (narrow, wide):
        raw = parse_solomon(Path(f"data/solomon/{name}.txt").read_text())
        row = [name]
        fleets = {}
        for period in ("P1", "P3"):
            inst = extend_instance(raw, period=period, n=40, seed=2)
            fleets[f"g{period}"] = greedy_insert(inst).m
            fleets[f"s{period}"] = its_run(inst, SearchParams(seed=0, **cfg)).plan.m
        print(f"{name:7s} {fleets['gP1']:>10d} {fleets['gP3']:>10d} "
              f"{fleets['sP1']:>8d} {fleets['sP3']:>8d}")
    print()
