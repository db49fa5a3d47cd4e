"""From a Solomon customer file to a hospital delivery instance.

The generator takes the first n customers of a base file, scatters them
over six floors, and plants one elevator at the bounding-box center.
Travel between floors is always routed through the elevator, so distances
stop being symmetric Euclidean geometry and start depending on where the
shaft happens to sit.
"""

from pathlib import Path

from amrsched import extend_instance, load_instance, parse_solomon, save_instance

raw = parse_solomon(Path("data/solomon/C108.txt").read_text())
print(f"base {raw.name}: {len(raw.customers)} customers, capacity {raw.capacity}")

inst = extend_instance(raw, period="P1", n=25, seed=3)
print(f"instance {inst.label}: {inst.n} requests, elevator at {inst.elevator}")

# floors make near neighbors far apart
same = [r for r in inst.requests if r.floor == inst.depot[2]]
other = [r for r in inst.requests if r.floor != inst.depot[2]]
d_same, lv = inst.distance(0, same[0].id)
print(f"depot -> request {same[0].id} (same floor): {d_same:.1f} m, {lv} levels")
d_other, lv = inst.distance(0, other[0].id)
print(f"depot -> request {other[0].id} (floor {other[0].floor}): {d_other:.1f} m via elevator, {lv} levels")

# morning-peak speeds vs off-peak, same leg
p1 = inst.travel_time(0, other[0].id)
p3 = extend_instance(raw, period="P3", n=25, seed=3).travel_time(0, other[0].id)
print(f"leg at P1: {p1}")
print(f"leg at P3: {p3}  (same variance, faster mean)")

# a 'day' instance carries the whole five-zone timetable instead
day = extend_instance(raw, period="day", n=25, seed=3)
print(f"\n{day.label} zones:")
for z in day.profile.zones:
    print(f"  [{z.start:7.0f}, {z.end:7.0f}) {z.travel_mean} s/m, {z.floor_mean} s/level")

# instances round-trip through a JSON document byte for byte
text = save_instance(inst)
assert load_instance(text) == inst
out = Path("/tmp/demo-instance.json")
out.write_text(text)
print(f"\nsaved {len(text)} bytes to {out}")
