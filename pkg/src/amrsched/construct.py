"""Greedy construction of an initial plan.

Requests are inserted in order of increasing window opening (ties broken by
deadline, then id).  Each request is appended to the end of the existing
route that can still take it, feasibility meaning the load fits and the mean
arrival makes the deadline; among feasible routes the one with the cheapest
growth in expected travel wins, ties going to the lowest robot index.  When
no route qualifies, a fresh robot is opened for the request.

Construction builds one trip per robot; multi-trip structure appears later
through depot-reload repair and the search moves.
"""

from __future__ import annotations

from .instances import Instance
from .normals import _clipped_max
from .plans import EPS, Plan, _zone_of


def greedy_insert(inst: Instance) -> Plan:
    """Deterministic greedy plan; mean arrivals meet every deadline."""
    order = sorted(
        range(1, inst.n + 1),
        key=lambda rid: (inst._ready[rid], inst._due[rid], rid),
    )
    mu_t = inst._mu_t
    var_t = inst._var_t
    zone_starts = inst._zone_starts
    single = len(zone_starts) == 1
    smean = inst._smean
    svar = inst._svar
    # route state per robot: request list, departure clock after the last
    # service as (mean, var), last node, and load already on board
    routes: list[dict] = []
    for rid in order:
        q = inst._demand[rid]
        ready = inst._ready[rid]
        due = inst._due[rid]
        best = None
        best_delta = None
        for k, rt in enumerate(routes):
            if rt["load"] + q > inst.capacity + EPS:
                continue
            z = 0 if single else _zone_of(zone_starts, rt["end_m"])
            leg = mu_t[z][rt["last"]][rid]
            a_m = rt["end_m"] + leg
            if a_m > due + EPS:
                continue
            a_v = rt["end_v"] + var_t[z][rt["last"]][rid]
            y_m, y_v = _clipped_max(a_m, a_v, ready)
            dep_m = y_m + smean[rid]
            z_back = 0 if single else _zone_of(zone_starts, dep_m)
            delta = leg + mu_t[z_back][rid][0] - mu_t[z][rt["last"]][0]
            if best_delta is None or delta < best_delta:
                best_delta = delta
                best = (k, y_m, y_v)
        if best is None:
            z = 0 if single else _zone_of(zone_starts, 0.0)
            a_m = mu_t[z][0][rid]
            a_v = var_t[z][0][rid]
            y_m, y_v = _clipped_max(a_m, a_v, ready)
            routes.append(
                {
                    "trip": [rid],
                    "end_m": y_m + smean[rid],
                    "end_v": y_v + svar[rid],
                    "last": rid,
                    "load": q,
                }
            )
        else:
            k, y_m, y_v = best
            rt = routes[k]
            rt["trip"].append(rid)
            rt["end_m"] = y_m + smean[rid]
            rt["end_v"] = y_v + svar[rid]
            rt["last"] = rid
            rt["load"] += q
    return Plan([[rt["trip"]] for rt in routes])
