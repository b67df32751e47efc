"""Flat-array kernels for the big Monte Carlo runs and the skeleton census.

These replay exactly the process of game.run_game on numpy arrays, jitted
with numba. The reference engine is the semantic authority; the tests drive
both from the same per-trial substreams (see game.trial_streams) and require
trajectory-for-trajectory equality.

Layout notes, shared by kernel and reference engine:
  - edge slots: inserting m into slot j replaces it with (min(e), m) and
    appends (max(e), m); Bob (and uniform Alice) turn one uniform double u
    into the slot index int(u * edge_count);
  - the subdivided-edge maps are flat (horizon+1)^2 arrays, written once per
    pair and unwritten after each trial, which is why kernel horizons are
    capped: the map would outgrow memory.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from numba import njit

from .cycles import InsertionHistory

STRATEGY_IDS = {"random": 0, "greedy-common": 1, "scripted": 2}

# (horizon+1)^2 int32 cells = 67 MB at the cap; raise deliberately, not by OOM.
KERNEL_MAX_HORIZON = 4096

CHUNK_TRIALS = 4096


def worker_count() -> int:
    """Worker cap for trial- and block-parallel phases (PEDIGREE_THREADS)."""
    env = os.environ.get("PEDIGREE_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


@njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit(cache=True, nogil=True)
def _run_chunk(
    horizon,
    strategy,
    a_u,
    b_u,
    scr_lo,
    scr_hi,
    win_lo,
    win_hi,
    ins_a,
    ins_b,
    out_y,
    out_s,
    out_t,
    out_d,
    out_td,
    trace_ds,
    trace_dt,
    trace_iso,
    trace_c,
    do_trace,
):
    K = horizon + 1
    trials = b_u.shape[0]
    nbr_a = np.empty((K, 2), np.int64)
    nbr_b = np.empty((K, 2), np.int64)
    nu_lo_a = np.zeros(K, np.int64)
    nu_hi_a = np.zeros(K, np.int64)
    nu_lo_b = np.zeros(K, np.int64)
    nu_hi_b = np.zeros(K, np.int64)
    slots_a = np.empty((horizon, 2), np.int64)
    slots_b = np.empty((horizon, 2), np.int64)
    parent = np.empty(K, np.int64)
    com_lo = np.empty(K + 3, np.int64)
    com_hi = np.empty(K + 3, np.int64)

    for t in range(trials):
        nbr_a[1, 0] = 2
        nbr_a[1, 1] = 3
        nbr_a[2, 0] = 1
        nbr_a[2, 1] = 3
        nbr_a[3, 0] = 1
        nbr_a[3, 1] = 2
        nbr_b[1, 0] = 2
        nbr_b[1, 1] = 3
        nbr_b[2, 0] = 1
        nbr_b[2, 1] = 3
        nbr_b[3, 0] = 1
        nbr_b[3, 1] = 2
        slots_a[0, 0] = 1
        slots_a[0, 1] = 2
        slots_a[1, 0] = 2
        slots_a[1, 1] = 3
        slots_a[2, 0] = 1
        slots_a[2, 1] = 3
        slots_b[0, 0] = 1
        slots_b[0, 1] = 2
        slots_b[1, 0] = 2
        slots_b[1, 1] = 3
        slots_b[2, 0] = 1
        slots_b[2, 1] = 3
        for i in range(4, K):
            parent[i] = i
        s = 3
        t_comp = 0
        y = 0
        dmoves = 0
        t_dec = 0
        com_n = 0
        if strategy == 1:
            com_lo[0] = 1
            com_hi[0] = 2
            com_lo[1] = 2
            com_hi[1] = 3
            com_lo[2] = 1
            com_hi[2] = 3
            com_n = 3

        for m in range(4, horizon + 1):
            ne = m - 1

            if strategy == 0:
                j = int(a_u[t, m - 4] * ne)
                ua = slots_a[j, 0]
                va = slots_a[j, 1]
            elif strategy == 1:
                j = -1
                if com_n > 0:
                    ua = com_lo[0]
                    va = com_hi[0]
                    for i in range(1, com_n):
                        if com_lo[i] < ua or (com_lo[i] == ua and com_hi[i] < va):
                            ua = com_lo[i]
                            va = com_hi[i]
                else:
                    x = nbr_a[1, 0]
                    if nbr_a[1, 1] < x:
                        x = nbr_a[1, 1]
                    ua = 1
                    va = x
            else:
                j = -1
                ua = scr_lo[m]
                va = scr_hi[m]

            jb = int(b_u[t, m - 4] * ne)
            ub = slots_b[jb, 0]
            vb = slots_b[jb, 1]

            # All membership tests run on the time-(m-1) structures.
            alice_common = nbr_b[ua, 0] == va or nbr_b[ua, 1] == va
            both_same = ua == ub and va == vb
            bob_common = both_same or nbr_a[ub, 0] == vb or nbr_a[ub, 1] == vb
            h = 0
            if ua == ub or ua == vb:
                h += 1
            if va == ub or va == vb:
                h += 1
            is_c = alice_common

            prev_t = t_comp
            iso = False
            if not both_same:
                deg = 0
                e1 = 0
                e2 = 0
                e3 = 0
                e4 = 0
                k = ins_b[ua * K + va]
                if k != 0:
                    e1 = k
                    deg += 1
                k = ins_a[ub * K + vb]
                if k != 0:
                    e2 = k
                    deg += 1
                if va >= 4 and nu_lo_b[va] != ua and nu_hi_b[va] != ua:
                    e3 = va
                    deg += 1
                if vb >= 4 and nu_lo_a[vb] != ub and nu_hi_a[vb] != ub:
                    e4 = vb
                    deg += 1
                t_comp += 1
                if deg == 0:
                    y += 1
                    iso = True
                else:
                    if e1 != 0:
                        ra = _find(parent, m)
                        rb = _find(parent, e1)
                        if ra != rb:
                            parent[rb] = ra
                            t_comp -= 1
                    if e2 != 0:
                        ra = _find(parent, m)
                        rb = _find(parent, e2)
                        if ra != rb:
                            parent[rb] = ra
                            t_comp -= 1
                    if e3 != 0:
                        ra = _find(parent, m)
                        rb = _find(parent, e3)
                        if ra != rb:
                            parent[rb] = ra
                            t_comp -= 1
                    if e4 != 0:
                        ra = _find(parent, m)
                        rb = _find(parent, e4)
                        if ra != rb:
                            parent[rb] = ra
                            t_comp -= 1

            destroyed = 0
            if alice_common:
                destroyed += 1
            if bob_common and not both_same:
                destroyed += 1
            ds = h - destroyed
            s += ds

            if strategy == 1:
                if alice_common:
                    for i in range(com_n):
                        if com_lo[i] == ua and com_hi[i] == va:
                            com_lo[i] = com_lo[com_n - 1]
                            com_hi[i] = com_hi[com_n - 1]
                            com_n -= 1
                            break
                if bob_common and not both_same:
                    for i in range(com_n):
                        if com_lo[i] == ub and com_hi[i] == vb:
                            com_lo[i] = com_lo[com_n - 1]
                            com_hi[i] = com_hi[com_n - 1]
                            com_n -= 1
                            break
                if ua == ub or ua == vb:
                    com_lo[com_n] = ua
                    com_hi[com_n] = m
                    com_n += 1
                if va == ub or va == vb:
                    com_lo[com_n] = va
                    com_hi[com_n] = m
                    com_n += 1

            if nbr_a[ua, 0] == va:
                nbr_a[ua, 0] = m
            else:
                nbr_a[ua, 1] = m
            if nbr_a[va, 0] == ua:
                nbr_a[va, 0] = m
            else:
                nbr_a[va, 1] = m
            nbr_a[m, 0] = ua
            nbr_a[m, 1] = va
            if nbr_b[ub, 0] == vb:
                nbr_b[ub, 0] = m
            else:
                nbr_b[ub, 1] = m
            if nbr_b[vb, 0] == ub:
                nbr_b[vb, 0] = m
            else:
                nbr_b[vb, 1] = m
            nbr_b[m, 0] = ub
            nbr_b[m, 1] = vb

            nu_lo_a[m] = ua
            nu_hi_a[m] = va
            nu_lo_b[m] = ub
            nu_hi_b[m] = vb
            ins_a[ua * K + va] = m
            ins_b[ub * K + vb] = m

            slots_b[jb, 0] = ub
            slots_b[jb, 1] = m
            slots_b[ne, 0] = vb
            slots_b[ne, 1] = m
            if strategy == 0:
                slots_a[j, 0] = ua
                slots_a[j, 1] = m
                slots_a[ne, 0] = va
                slots_a[ne, 1] = m

            dt = t_comp - prev_t
            if win_lo < m <= win_hi:
                if not is_c:
                    dmoves += 1
                if dt < 0:
                    t_dec = 1
            if do_trace:
                trace_ds[m] = ds
                trace_dt[m] = dt
                trace_iso[m] = 1 if iso else 0
                trace_c[m] = 1 if is_c else 0

        out_y[t] = y
        out_s[t] = s
        out_t[t] = t_comp
        out_d[t] = dmoves
        out_td[t] = t_dec

        for m in range(4, horizon + 1):
            ins_a[nu_lo_a[m] * K + nu_hi_a[m]] = 0
            ins_b[nu_lo_b[m] * K + nu_hi_b[m]] = 0


def _scripted_arrays(history: InsertionHistory, horizon: int):
    if history.last_node < horizon:
        raise ValueError(
            f"scripted history ends at {history.last_node}, horizon {horizon} requested"
        )
    lo = np.zeros(horizon + 1, np.int64)
    hi = np.zeros(horizon + 1, np.int64)
    for m in range(4, horizon + 1):
        u, v = history.edge_of(m)
        lo[m] = u
        hi[m] = v
    return lo, hi


def _draws(seed: int, trial: int, horizon: int, need_alice: bool):
    cols = horizon - 3
    if need_alice:
        a = np.random.default_rng(np.random.SeedSequence((seed, trial, 0))).random(cols)
    else:
        a = None
    b = np.random.default_rng(np.random.SeedSequence((seed, trial, 1))).random(cols)
    return a, b


def _check_horizon(horizon: int):
    if horizon < 4:
        raise ValueError(f"need horizon >= 4, got {horizon}")
    if horizon > KERNEL_MAX_HORIZON:
        raise ValueError(
            f"horizon {horizon} exceeds the kernel cap {KERNEL_MAX_HORIZON}"
        )


def mc_trials(
    horizon: int,
    strategy: str,
    trials: int,
    seed: int,
    *,
    window: tuple[int, int] = (0, 0),
    scripted: InsertionHistory | None = None,
    workers: int | None = None,
) -> dict[str, np.ndarray]:
    """Per-trial aggregates for `trials` independent games.

    Returns arrays keyed isolated, final_common, final_components,
    window_dmoves, window_t_decreased, indexed by trial. Deterministic in
    (seed, horizon, strategy): trial t always uses substreams
    (seed, t, 0/1) regardless of chunking or workers.
    """
    _check_horizon(horizon)
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    sid = STRATEGY_IDS[strategy]
    if sid == 2:
        if scripted is None:
            raise ValueError("scripted strategy needs a history")
        scr_lo, scr_hi = _scripted_arrays(scripted, horizon)
    else:
        scr_lo = np.zeros(1, np.int64)
        scr_hi = np.zeros(1, np.int64)

    out = {
        "isolated": np.empty(trials, np.int64),
        "final_common": np.empty(trials, np.int64),
        "final_components": np.empty(trials, np.int64),
        "window_dmoves": np.empty(trials, np.int64),
        "window_t_decreased": np.empty(trials, np.int64),
    }
    dummy = np.zeros(1, np.int64)
    win_lo, win_hi = window

    def run_block(start: int, stop: int):
        count = stop - start
        cols = horizon - 3
        a_u = np.zeros((count if sid == 0 else 1, 1 if sid != 0 else cols))
        b_u = np.empty((count, cols))
        for i in range(count):
            a, b = _draws(seed, start + i, horizon, sid == 0)
            if sid == 0:
                a_u[i] = a
            b_u[i] = b
        ins_a = np.zeros((horizon + 1) * (horizon + 1), np.int32)
        ins_b = np.zeros((horizon + 1) * (horizon + 1), np.int32)
        _run_chunk(
            horizon,
            sid,
            a_u,
            b_u,
            scr_lo,
            scr_hi,
            win_lo,
            win_hi,
            ins_a,
            ins_b,
            out["isolated"][start:stop],
            out["final_common"][start:stop],
            out["final_components"][start:stop],
            out["window_dmoves"][start:stop],
            out["window_t_decreased"][start:stop],
            dummy,
            dummy,
            dummy,
            dummy,
            False,
        )

    blocks = [
        (lo, min(lo + CHUNK_TRIALS, trials)) for lo in range(0, trials, CHUNK_TRIALS)
    ]
    n_workers = min(workers or worker_count(), len(blocks))
    if n_workers <= 1:
        for lo, hi in blocks:
            run_block(lo, hi)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(lambda blk: run_block(*blk), blocks))
    return out


def mc_trace(
    horizon: int,
    strategy: str,
    seed: int,
    trial: int,
    *,
    scripted: InsertionHistory | None = None,
) -> dict[str, np.ndarray]:
    """Per-step telemetry of one trial, for cross-checking the reference engine.

    Arrays are indexed by the inserted node m (entries 0..3 unused).
    """
    _check_horizon(horizon)
    sid = STRATEGY_IDS[strategy]
    if sid == 2:
        scr_lo, scr_hi = _scripted_arrays(scripted, horizon)
    else:
        scr_lo = np.zeros(1, np.int64)
        scr_hi = np.zeros(1, np.int64)
    a, b = _draws(seed, trial, horizon, sid == 0)
    a_u = a.reshape(1, -1) if a is not None else np.zeros((1, 1))
    b_u = b.reshape(1, -1)
    ins_a = np.zeros((horizon + 1) * (horizon + 1), np.int32)
    ins_b = np.zeros((horizon + 1) * (horizon + 1), np.int32)
    one = lambda: np.empty(1, np.int64)  # noqa: E731
    trace = {
        "delta_common": np.zeros(horizon + 1, np.int64),
        "delta_components": np.zeros(horizon + 1, np.int64),
        "isolated": np.zeros(horizon + 1, np.int64),
        "c_move": np.zeros(horizon + 1, np.int64),
    }
    out_y, out_s, out_t, out_d, out_td = (one() for _ in range(5))
    _run_chunk(
        horizon,
        sid,
        a_u,
        b_u,
        scr_lo,
        scr_hi,
        0,
        0,
        ins_a,
        ins_b,
        out_y,
        out_s,
        out_t,
        out_d,
        out_td,
        trace["delta_common"],
        trace["delta_components"],
        trace["isolated"],
        trace["c_move"],
        True,
    )
    trace["final"] = {
        "isolated": int(out_y[0]),
        "final_common": int(out_s[0]),
        "final_components": int(out_t[0]),
    }
    return trace


@njit(cache=True, nogil=True)
def _pairwise_degrees(nu_lo, nu_hi, n, i_start, i_end, deg_out):
    tours = nu_lo.shape[0]
    parent = np.empty(n + 1, np.int64)
    for i in range(i_start, i_end):
        for j in range(i + 1, tours):
            t_comp = 0
            for x in range(4, n + 1):
                parent[x] = x
            for m in range(4, n + 1):
                alo = nu_lo[i, m]
                ahi = nu_hi[i, m]
                blo = nu_lo[j, m]
                bhi = nu_hi[j, m]
                if alo == blo and ahi == bhi:
                    continue
                t_comp += 1
                e1 = 0
                for k in range(4, m):
                    if nu_lo[j, k] == alo and nu_hi[j, k] == ahi:
                        e1 = k
                        break
                e2 = 0
                for k in range(4, m):
                    if nu_lo[i, k] == blo and nu_hi[i, k] == bhi:
                        e2 = k
                        break
                e3 = 0
                if ahi >= 4 and nu_lo[j, ahi] != alo and nu_hi[j, ahi] != alo:
                    e3 = ahi
                e4 = 0
                if bhi >= 4 and nu_lo[i, bhi] != blo and nu_hi[i, bhi] != blo:
                    e4 = bhi
                if e1 != 0:
                    ra = _find(parent, m)
                    rb = _find(parent, e1)
                    if ra != rb:
                        parent[rb] = ra
                        t_comp -= 1
                if e2 != 0:
                    ra = _find(parent, m)
                    rb = _find(parent, e2)
                    if ra != rb:
                        parent[rb] = ra
                        t_comp -= 1
                if e3 != 0:
                    ra = _find(parent, m)
                    rb = _find(parent, e3)
                    if ra != rb:
                        parent[rb] = ra
                        t_comp -= 1
                if e4 != 0:
                    ra = _find(parent, m)
                    rb = _find(parent, e4)
                    if ra != rb:
                        parent[rb] = ra
                        t_comp -= 1
            if t_comp <= 1:
                deg_out[i] += 1
                deg_out[j] += 1


def pairwise_adjacency_degrees(
    histories: list[InsertionHistory], n: int, workers: int | None = None
) -> np.ndarray:
    """Degree of each tour in the skeleton at time n, all pairs tested.

    Block-parallel over leading rows; each worker accumulates into its own
    array and the sum is reduced in block order, so results do not depend
    on the worker count.
    """
    tours = len(histories)
    nu_lo = np.zeros((tours, n + 1), np.int64)
    nu_hi = np.zeros((tours, n + 1), np.int64)
    for i, h in enumerate(histories):
        for m in range(4, n + 1):
            u, v = h.edge_of(m)
            nu_lo[i, m] = u
            nu_hi[i, m] = v

    n_workers = min(workers or worker_count(), max(1, tours // 8))
    if n_workers <= 1:
        deg = np.zeros(tours, np.int64)
        _pairwise_degrees(nu_lo, nu_hi, n, 0, tours, deg)
        return deg

    # Leading rows pair with everything after them, so early blocks are
    # heavier; slice by equal pair counts rather than equal row counts.
    bounds = [0]
    total_pairs = tours * (tours - 1) // 2
    target = total_pairs / n_workers
    acc = 0.0
    for i in range(tours):
        acc += tours - 1 - i
        if acc >= target * len(bounds) and i + 1 < tours:
            bounds.append(i + 1)
    bounds.append(tours)
    parts = [np.zeros(tours, np.int64) for _ in range(len(bounds) - 1)]

    def run(idx: int):
        _pairwise_degrees(nu_lo, nu_hi, n, bounds[idx], bounds[idx + 1], parts[idx])

    with ThreadPoolExecutor(max_workers=n_workers) as pool:
        list(pool.map(run, range(len(parts))))
    deg = np.zeros(tours, np.int64)
    for p in parts:
        deg += p
    return deg
