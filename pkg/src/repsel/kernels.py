"""Hot selection loops: numba-jitted kernels with a pure-numpy fallback.

The sequential scans are data-dependent (each decision changes the
comparison set for later tokens), so they cannot be expressed as one
matmul.  The jitted path computes only the dot products the scan
actually needs; the numpy path leans on BLAS blocks instead.

Set REPSEL_NUMBA=0 to force the numpy path (also used automatically
when numba is unavailable).  Both paths accumulate in float64 and agree
to the last few ulps; `benchmarks/bench_kernels.py` compares them.
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("REPSEL_NUMBA", "1").strip().lower()
NUMBA_ENABLED = _flag not in ("0", "false", "off", "no")

if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        NUMBA_ENABLED = False

if not NUMBA_ENABLED:  # identity decorator so the kernel source stays shared
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda func: func


@njit(cache=True)
def _scan_reps_only_jit(xhat, thresh):
    T, d = xhat.shape
    reps = np.empty(T, np.int64)
    gammas = np.zeros(T, np.float64)
    reps[0] = 0
    nreps = 1
    for t in range(1, T):
        best = 0.0
        for j in range(nreps):
            s = reps[j]
            acc = 0.0
            for k in range(d):
                acc += xhat[s, k] * xhat[t, k]
            a = abs(acc)
            if a > best:
                best = a
        gammas[t] = best
        if best < thresh:
            reps[nreps] = t
            nreps += 1
    return reps[:nreps].copy(), gammas


@njit(cache=True)
def _scan_all_earlier_jit(xhat, thresh):
    T, d = xhat.shape
    keep = np.zeros(T, np.bool_)
    gammas = np.zeros(T, np.float64)
    keep[0] = True
    for t in range(1, T):
        best = 0.0
        for s in range(t):
            acc = 0.0
            for k in range(d):
                acc += xhat[s, k] * xhat[t, k]
            a = abs(acc)
            if a > best:
                best = a
        gammas[t] = best
        if best < thresh:
            keep[t] = True
    return np.flatnonzero(keep), gammas


@njit(cache=True)
def _earlier_rep_max_jit(xr):
    r, d = xr.shape
    gam = np.zeros(r, np.float64)
    for i in range(1, r):
        best = 0.0
        for j in range(i):
            acc = 0.0
            for k in range(d):
                acc += xr[j, k] * xr[i, k]
            a = abs(acc)
            if a > best:
                best = a
        gam[i] = best
    return gam


@njit(cache=True)
def _validate_sequential_jit(xr, thresh):
    r, d = xr.shape
    gam = np.zeros(r, np.float64)
    valid = np.zeros(r, np.bool_)
    valid[0] = True
    for i in range(1, r):
        best = 0.0
        for j in range(i):
            if not valid[j]:
                continue
            acc = 0.0
            for k in range(d):
                acc += xr[j, k] * xr[i, k]
            a = abs(acc)
            if a > best:
                best = a
        gam[i] = best
        valid[i] = best < thresh
    return gam, valid


def _scan_reps_only_np(xhat, thresh):
    T = xhat.shape[0]
    rep_rows = np.empty_like(xhat)
    rep_rows[0] = xhat[0]
    reps = [0]
    gammas = np.zeros(T)
    for t in range(1, T):
        g = float(np.max(np.abs(rep_rows[: len(reps)] @ xhat[t])))
        gammas[t] = g
        if g < thresh:
            rep_rows[len(reps)] = xhat[t]
            reps.append(t)
    return np.asarray(reps, dtype=np.int64), gammas


def _scan_all_earlier_np(xhat, thresh):
    # Decisions do not feed back in this mode, so one Gram product suffices.
    g = np.abs(xhat @ xhat.T)
    np.fill_diagonal(g, 0.0)
    gammas = np.zeros(xhat.shape[0])
    if xhat.shape[0] > 1:
        tril = np.tril(g, k=-1)
        gammas[1:] = tril[1:].max(axis=1)
    keep = gammas < thresh
    keep[0] = True
    return np.flatnonzero(keep), gammas


def _earlier_rep_max_np(xr):
    g = np.abs(xr @ xr.T)
    gam = np.zeros(xr.shape[0])
    for i in range(1, xr.shape[0]):
        gam[i] = g[i, :i].max()
    return gam


def _validate_sequential_np(xr, thresh):
    g = np.abs(xr @ xr.T)
    r = xr.shape[0]
    gam = np.zeros(r)
    valid = np.zeros(r, dtype=bool)
    valid[0] = True
    for i in range(1, r):
        prior = np.flatnonzero(valid[:i])
        gam[i] = g[i, prior].max() if prior.size else 0.0
        valid[i] = gam[i] < thresh
    return gam, valid


def selection_scan(xhat: np.ndarray, thresh: float, reps_only: bool):
    """Sequential scan over tokens; returns (rep_indices, gammas).

    gammas[t] is the max |cosine| token t saw against its comparison
    set (earlier reps when reps_only, all earlier tokens otherwise);
    token 0 gets 0.0 by the empty-max convention.
    """
    xhat = np.ascontiguousarray(xhat, dtype=np.float64)
    if NUMBA_ENABLED:
        fn = _scan_reps_only_jit if reps_only else _scan_all_earlier_jit
    else:
        fn = _scan_reps_only_np if reps_only else _scan_all_earlier_np
    return fn(xhat, float(thresh))


def earlier_rep_max(xr: np.ndarray) -> np.ndarray:
    """Per inherited rep (rows in token-index order), max |cosine|
    against every earlier-indexed inherited rep, surviving or not."""
    xr = np.ascontiguousarray(xr, dtype=np.float64)
    if NUMBA_ENABLED:
        return _earlier_rep_max_jit(xr)
    return _earlier_rep_max_np(xr)


def validate_sequential(xr: np.ndarray, thresh: float):
    """Sequential validation of inherited reps in token-index order.

    Each rep is compared only against earlier reps that survived, so a
    removal is always witnessed by a surviving rep; returns the per-rep
    max |cosine| and the keep mask."""
    xr = np.ascontiguousarray(xr, dtype=np.float64)
    if NUMBA_ENABLED:
        return _validate_sequential_jit(xr, float(thresh))
    return _validate_sequential_np(xr, float(thresh))


def cross_abs_max(candidates: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Per candidate row, max |dot| against all anchor rows.

    A plain BLAS product beats a jitted loop here, so both paths share it.
    """
    if anchors.shape[0] == 0:
        return np.zeros(candidates.shape[0])
    return np.max(np.abs(candidates @ anchors.T), axis=1)


def warmup():
    """Trigger JIT compilation on tiny inputs so timed runs are clean."""
    x = np.eye(3, dtype=np.float64)
    selection_scan(x, 0.5, reps_only=True)
    selection_scan(x, 0.5, reps_only=False)
    earlier_rep_max(x)
    validate_sequential(x, 0.5)
