"""Tests for instance parsing, extension, geometry, and serialization."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amrsched.benchgen import BASE_NAMES, make_base_text
from amrsched.instances import (
    InfeasibleInstanceError,
    Instance,
    InstanceFormatError,
    Request,
    SolomonFormatError,
    SpeedProfile,
    SpeedZone,
    clock_to_seconds,
    extend_instance,
    load_instance,
    parse_solomon,
    save_instance,
    seconds_to_clock,
    zero_variance_copy,
)
from amrsched.normals import Gaussian

SOLOMON_SAMPLE = """\
TOY5

VEHICLE
NUMBER     CAPACITY
  25         200

CUSTOMER
CUST NO.  XCOORD.   YCOORD.    DEMAND   READY TIME   DUE DATE   SERVICE TIME

    0      40         50          0          0       1236          0
    1      45         68         10        830       1049         90
    2      45         70         30        756        939         90
    3      42         66         10         16        336         90
    4      42         68         10        643        866         90
    5      42         65         10        157        298         90
"""


def test_parse_solomon_sample():
    raw = parse_solomon(SOLOMON_SAMPLE)
    assert raw.name == "TOY5"
    assert raw.capacity == 200.0
    assert raw.vehicle_count == 25
    assert raw.depot.x == 40 and raw.depot.y == 50 and raw.depot.due == 1236
    assert len(raw.customers) == 5
    assert raw.customers[0].ready == 830.0
    assert raw.customers[4].service == 90.0


def test_parse_solomon_errors():
    with pytest.raises(SolomonFormatError, match="no header"):
        parse_solomon("")
    with pytest.raises(SolomonFormatError, match="capacity"):
        parse_solomon("NAME\n\nCUSTOMER\nCUST NO.\n 0 40 50 0 0 10 0\n 1 1 1 1 0 10 1\n")
    bad_row = SOLOMON_SAMPLE.replace("    5      42         65         10        157        298         90", "5 42 65")
    with pytest.raises(SolomonFormatError, match="line"):
        parse_solomon(bad_row)


def test_extend_instance_basic():
    raw = parse_solomon(SOLOMON_SAMPLE)
    inst = extend_instance(raw, "P1", 5, seed=7)
    assert inst.label == "P1-TOY5-5"
    assert inst.n == 5
    assert inst.capacity == 200.0
    assert inst.depot == (40.0, 50.0, 1)
    assert all(1 <= r.floor <= 6 for r in inst.requests)
    assert all(r.service == Gaussian(90.0, 15.0) for r in inst.requests)
    # bounding box of depot plus the five customers
    assert inst.elevator == ((40 + 45) / 2, (50 + 70) / 2)
    zone = inst.profile.zones[0]
    assert (zone.travel_mean, zone.floor_mean) == (1.4, 3.2)
    assert zone.start == 0.0 and zone.end == inst.horizon == 86400.0


def test_extend_instance_deterministic_and_seed_sensitive():
    raw = parse_solomon(SOLOMON_SAMPLE)
    a = extend_instance(raw, "P2", 5, seed=3)
    b = extend_instance(raw, "P2", 5, seed=3)
    c = extend_instance(raw, "P2", 5, seed=4)
    assert save_instance(a) == save_instance(b)
    assert [r.floor for r in a.requests] != [r.floor for r in c.requests]


def test_extend_instance_time_scale():
    raw = parse_solomon(SOLOMON_SAMPLE)
    inst = extend_instance(raw, "P3", 5, seed=1, time_scale=2.0)
    assert inst.requests[0].ready == 1660.0
    assert inst.requests[0].service.mean == 180.0
    # the fixed service variance is a model constant, not a file quantity
    assert inst.requests[0].service.variance == 15.0
    with pytest.raises(ValueError):
        extend_instance(raw, "P3", 5, seed=1, time_scale=0.0)


def test_extend_instance_rejects_bad_args():
    raw = parse_solomon(SOLOMON_SAMPLE)
    with pytest.raises(ValueError, match="period"):
        extend_instance(raw, "P4", 5, seed=1)
    with pytest.raises(ValueError):
        extend_instance(raw, "P1", 6, seed=1)


def _toy_instance(**overrides):
    defaults = dict(
        label="toy",
        depot=(0.0, 0.0, 1),
        elevator=(3.0, 4.0),
        requests=(
            Request(1, 0.0, 0.0, 2, 10.0, 0.0, 500.0, Gaussian(60.0, 15.0)),
            Request(2, 0.0, 0.0, 5, 10.0, 0.0, 800.0, Gaussian(60.0, 15.0)),
        ),
        capacity=100.0,
        profile=SpeedProfile.for_period("P1"),
    )
    defaults.update(overrides)
    return Instance(**defaults)


def test_distance_same_floor_and_elevator():
    inst = _toy_instance(
        requests=(
            Request(1, 30.0, 40.0, 1, 10.0, 0.0, 500.0, Gaussian(60.0, 15.0)),
            Request(2, 0.0, 0.0, 5, 10.0, 0.0, 800.0, Gaussian(60.0, 15.0)),
        )
    )
    # same floor as the depot: direct Euclidean, zero levels
    assert inst.distance(0, 1) == (50.0, 0)
    # different floors: via the elevator at (3, 4), five meters from both points
    d, levels = inst.distance(0, 2)
    assert d == pytest.approx(10.0)
    assert levels == 4
    assert inst.distance(2, 2) == (0.0, 0)
    assert inst.distance(1, 2) == inst.distance(2, 1)
    with pytest.raises(KeyError):
        inst.distance(0, 9)


def test_travel_time_period_means():
    # d = 100 m, two levels apart
    req = Request(1, 100.0, 0.0, 3, 10.0, 0.0, 86400.0, Gaussian(60.0, 15.0))
    for period, (mu, expected) in {
        "P1": (1.4, 146.4),
        "P2": (1.3, 136.0),
        "P3": (1.1, 115.4),
    }.items():
        inst = Instance(
            label="tt",
            depot=(0.0, 0.0, 1),
            elevator=(50.0, 0.0),
            requests=(req,),
            capacity=50.0,
            profile=SpeedProfile.for_period(period),
        )
        t = inst.travel_time(0, 1, 0.0)
        assert t.mean == pytest.approx(expected, abs=1e-9)
        assert t.variance == pytest.approx(100.0**2 * 0.15 + 2.0**2 * 0.5, abs=1e-9)


def test_travel_time_zone_selection():
    profile = SpeedProfile(
        zones=(
            SpeedZone(0.0, 1800.0, 1.1, 2.7),
            SpeedZone(1800.0, 16200.0, 1.4, 3.2),
            SpeedZone(16200.0, 86400.0, 1.1, 2.7),
        )
    )
    req = Request(1, 100.0, 0.0, 1, 10.0, 0.0, 86400.0, Gaussian(60.0, 15.0))
    inst = _toy_instance(requests=(req,), profile=profile)
    assert inst.travel_time(0, 1, 0.0).mean == pytest.approx(110.0)
    assert inst.travel_time(0, 1, 1800.0).mean == pytest.approx(140.0)  # boundary joins the later zone
    assert inst.travel_time(0, 1, 5000.0).mean == pytest.approx(140.0)
    assert inst.travel_time(0, 1, 20000.0).mean == pytest.approx(110.0)
    # departures past the horizon reuse the last zone
    assert inst.travel_time(0, 1, 1e6).mean == pytest.approx(110.0)


def test_travel_time_means_decrease_p1_to_p3():
    raw = parse_solomon(make_base_text("RC101"))
    insts = [extend_instance(raw, p, 20, seed=5) for p in ("P1", "P2", "P3")]
    for i in range(0, 5):
        for j in range(0, 5):
            if i == j:
                continue
            means = [inst.travel_time(i, j, 0.0).mean for inst in insts]
            assert means[0] > means[1] > means[2]
            assert insts[0].travel_time(i, j, 0.0).variance == insts[2].travel_time(i, j, 0.0).variance


def test_instance_validation():
    with pytest.raises(InfeasibleInstanceError):
        _toy_instance(capacity=5.0)
    with pytest.raises(InstanceFormatError, match="contiguous"):
        _toy_instance(
            requests=(Request(2, 0.0, 0.0, 2, 10.0, 0.0, 500.0, Gaussian(60.0, 15.0)),)
        )
    with pytest.raises(InstanceFormatError, match="window"):
        _toy_instance(
            requests=(Request(1, 0.0, 0.0, 2, 10.0, 500.0, 400.0, Gaussian(60.0, 15.0)),)
        )
    with pytest.raises(InstanceFormatError, match="cost"):
        _toy_instance(amr_cost=0.05)


def test_zone_clock_arithmetic():
    assert clock_to_seconds("08:00") == 1800.0
    assert clock_to_seconds("12:00") == 16200.0
    assert clock_to_seconds("14:00") == 23400.0
    assert clock_to_seconds("16:00") == 30600.0
    assert seconds_to_clock(1835.0) == "08:00:35"
    assert seconds_to_clock(0.0) == "07:30:00"
    assert seconds_to_clock(clock_to_seconds("23:59:59")) == "23:59:59"


def test_save_load_round_trip_bytes():
    raw = parse_solomon(make_base_text("C108"))
    inst = extend_instance(raw, "P2", 50, seed=11)
    text = save_instance(inst)
    again = save_instance(load_instance(text))
    assert again == text


def test_load_instance_missing_field():
    raw = parse_solomon(SOLOMON_SAMPLE)
    text = save_instance(extend_instance(raw, "P1", 5, seed=1))
    broken = text.replace('"capacity"', '"capacity_zzz"')
    with pytest.raises(InstanceFormatError, match='"capacity"'):
        load_instance(broken)
    with pytest.raises(InstanceFormatError, match="JSON"):
        load_instance("{nope")


def test_zero_variance_copy():
    raw = parse_solomon(SOLOMON_SAMPLE)
    inst = zero_variance_copy(extend_instance(raw, "P3", 5, seed=2))
    assert inst.profile.travel_variance == 0.0
    assert inst.profile.floor_variance == 0.0
    assert all(r.service.variance == 0.0 for r in inst.requests)
    assert inst.travel_time(0, 1, 0.0).variance == 0.0
    # means untouched
    assert inst.travel_time(0, 1, 0.0).mean > 0.0


def test_committed_bases_match_generator(tmp_path):
    # the files under data/solomon are the generator's verbatim output
    import pathlib

    datadir = pathlib.Path(__file__).resolve().parent.parent / "data" / "solomon"
    for name in BASE_NAMES:
        committed = (datadir / f"{name}.txt").read_text()
        assert committed == make_base_text(name), name


def test_bases_have_expected_shape():
    for name in BASE_NAMES:
        raw = parse_solomon(make_base_text(name))
        assert len(raw.customers) == 100
        assert raw.depot.x == 40 and raw.depot.y == 50
        horizon = raw.depot.due
        for c in raw.customers:
            assert 0 <= c.ready < c.due <= horizon
            assert 0 < c.demand <= raw.capacity
        widths = [c.due - c.ready for c in raw.customers]
        if name[0] == "C" and name[1] == "2" or name.startswith(("R2", "RC2")):
            assert min(widths) > 0.2 * horizon
        if name in ("C108", "R101", "RC101"):
            assert max(widths) <= 110


coords = st.floats(min_value=-50.0, max_value=150.0, allow_nan=False)


@given(x1=coords, y1=coords, x2=coords, y2=coords, f1=st.integers(1, 6), f2=st.integers(1, 6))
def test_distance_symmetry_and_triangle_through_elevator(x1, y1, x2, y2, f1, f2):
    inst = _toy_instance(
        requests=(
            Request(1, x1, y1, f1, 10.0, 0.0, 500.0, Gaussian(60.0, 15.0)),
            Request(2, x2, y2, f2, 10.0, 0.0, 800.0, Gaussian(60.0, 15.0)),
        )
    )
    d12, l12 = inst.distance(1, 2)
    d21, l21 = inst.distance(2, 1)
    assert d12 == d21 and l12 == l21
    assert d12 >= 0 and l12 == abs(f1 - f2)
    if f1 != f2:
        ex, ey = inst.elevator
        assert d12 == pytest.approx(math.hypot(x1 - ex, y1 - ey) + math.hypot(x2 - ex, y2 - ey))
