"""Derivative-free local search over pure-state ensembles.

An ensemble is stored as the rows of ``P`` (shape ``m x D``): row ``i`` is
the unnormalized member ``sqrt(p_i) |psi_i>`` written side-A-first with
side A the smaller one, so the objective is ``sum_i f(P[i])`` with
``f(x) = |x|^2 S(x/|x|)``.  Left multiplication of ``P`` by a unitary keeps
the ensemble a decomposition of the same state, and every two-row Givens
rotation is such a unitary; together (up to irrelevant row phases) they
generate all of them.

A sweep visits every row pair once.  Each pair is improved by a few Newton
steps on a finite-difference model in the two rotation angles.  When a
sweep stalls, one pattern-search sweep follows, since the entropy has a
kink at product states where the quadratic model is poor.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numba import njit

_LN2 = math.log(2.0)
_MAX_STEP = math.pi / 4


class SearchRun(NamedTuple):
    value: float
    rows: np.ndarray
    converged: bool
    sweeps: int


@njit(cache=True)
def _weighted_entropy(x, da, db):
    """``|x|^2 S(x/|x|)`` in bits; ``x`` is a flattened ``da x db`` vector, ``da <= db``."""
    if da == 2:
        a = 0.0
        d = 0.0
        bre = 0.0
        bim = 0.0
        for k in range(db):
            u = x[k]
            v = x[db + k]
            a += u.real * u.real + u.imag * u.imag
            d += v.real * v.real + v.imag * v.imag
            w = u * v.conjugate()
            bre += w.real
            bim += w.imag
        half = 0.5 * (a + d)
        disc = math.sqrt(0.25 * (a - d) * (a - d) + bre * bre + bim * bim)
        m0 = max(half - disc, 0.0)
        m1 = max(half + disc, 0.0)
        t = m0 + m1
        out = 0.0
        if m0 > 1e-300:
            out += m0 * math.log(t / m0)
        if m1 > 1e-300:
            out += m1 * math.log(t / m1)
        return out / _LN2
    red = np.zeros((da, da), dtype=np.complex128)
    for i in range(da):
        for j in range(i, da):
            acc = 0j
            for k in range(db):
                acc += x[i * db + k] * x[j * db + k].conjugate()
            red[i, j] = acc
            red[j, i] = acc.conjugate()
    mu = np.linalg.eigvalsh(red)
    t = 0.0
    for k in range(da):
        if mu[k] > 0.0:
            t += mu[k]
    out = 0.0
    for k in range(da):
        if mu[k] > 1e-300:
            out += mu[k] * math.log(t / mu[k])
    return out / _LN2


@njit(cache=True)
def _pair_value(a, b, theta, phi, da, db, ra, rb):
    c = math.cos(theta)
    s = math.sin(theta)
    e = complex(math.cos(phi), math.sin(phi))
    ec = e.conjugate()
    for k in range(a.shape[0]):
        ra[k] = c * a[k] - e * s * b[k]
        rb[k] = ec * s * a[k] + c * b[k]
    return _weighted_entropy(ra, da, db) + _weighted_entropy(rb, da, db)


@njit(cache=True)
def _newton_pair(a, b, f0, da, db, ra, rb):
    x0 = 0.0
    x1 = 0.0
    f = f0
    h = 0.05
    g = np.empty((3, 3))
    for _ in range(8):
        for i in range(3):
            for j in range(3):
                if i == 1 and j == 1:
                    g[i, j] = f
                else:
                    g[i, j] = _pair_value(a, b, x0 + (i - 1) * h, x1 + (j - 1) * h, da, db, ra, rb)
        gx = (g[2, 1] - g[0, 1]) / (2 * h)
        gy = (g[1, 2] - g[1, 0]) / (2 * h)
        hxx = (g[2, 1] - 2 * g[1, 1] + g[0, 1]) / (h * h)
        hyy = (g[1, 2] - 2 * g[1, 1] + g[1, 0]) / (h * h)
        hxy = (g[2, 2] - g[2, 0] - g[0, 2] + g[0, 0]) / (4 * h * h)
        det = hxx * hyy - hxy * hxy
        if hxx > 0 and det > 0:
            d0 = -(hyy * gx - hxy * gy) / det
            d1 = -(hxx * gy - hxy * gx) / det
        else:
            d0 = -gx * h
            d1 = -gy * h
        n = math.sqrt(d0 * d0 + d1 * d1)
        if n > _MAX_STEP:
            d0 *= _MAX_STEP / n
            d1 *= _MAX_STEP / n
        best = f
        b0 = x0
        b1 = x1
        for i in range(3):
            for j in range(3):
                if g[i, j] < best:
                    best = g[i, j]
                    b0 = x0 + (i - 1) * h
                    b1 = x1 + (j - 1) * h
        scale = 1.0
        for _k in range(3):
            v = _pair_value(a, b, x0 + scale * d0, x1 + scale * d1, da, db, ra, rb)
            if v < best:
                best = v
                b0 = x0 + scale * d0
                b1 = x1 + scale * d1
            scale *= 0.5
        step = math.sqrt((b0 - x0) ** 2 + (b1 - x1) ** 2)
        x0 = b0
        x1 = b1
        f = best
        h = min(max(max(step, 0.25 * h), 1e-4), 0.2)
        if step < 1e-6:
            break
    return x0, x1, f


@njit(cache=True)
def _compass_pair(a, b, f0, da, db, ra, rb):
    x0 = 0.0
    x1 = 0.0
    f = f0
    st = 1e-2
    for _ in range(60):
        best = f
        b0 = x0
        b1 = x1
        for i in range(-1, 2):
            for j in range(-1, 2):
                if i == 0 and j == 0:
                    continue
                v = _pair_value(a, b, x0 + i * st, x1 + j * st, da, db, ra, rb)
                if v < best:
                    best = v
                    b0 = x0 + i * st
                    b1 = x1 + j * st
        if best < f - 1e-13:
            x0 = b0
            x1 = b1
            f = best
        else:
            st *= 0.5
            if st <= 1e-5:
                break
    return x0, x1, f


@njit(cache=True)
def _sweep(P, da, db, polish):
    m, dim = P.shape
    ra = np.empty(dim, dtype=np.complex128)
    rb = np.empty(dim, dtype=np.complex128)
    for i in range(m - 1):
        for j in range(i + 1, m):
            a = P[i].copy()
            b = P[j].copy()
            f0 = _weighted_entropy(a, da, db) + _weighted_entropy(b, da, db)
            if polish:
                t, p, f = _compass_pair(a, b, f0, da, db, ra, rb)
            else:
                t, p, f = _newton_pair(a, b, f0, da, db, ra, rb)
            if f < f0:
                _pair_value(a, b, t, p, da, db, ra, rb)
                P[i] = ra
                P[j] = rb
    total = 0.0
    for i in range(m):
        total += _weighted_entropy(P[i], da, db)
    return total


def objective(P: np.ndarray, da: int, db: int) -> float:
    return float(sum(_weighted_entropy(row, da, db) for row in P))


def random_isometry(rng: np.random.Generator, m: int, r: int) -> np.ndarray:
    """Haar-random ``m x r`` isometry."""
    z = rng.normal(size=(m, m)) + 1j * rng.normal(size=(m, m))
    q, rr = np.linalg.qr(z)
    q = q * (np.diagonal(rr) / np.abs(np.diagonal(rr)))
    return q[:, :r]


def _descend(P, da, db, max_sweeps, tol):
    f = objective(P, da, db)
    sweeps = 0
    polish = False
    while sweeps < max_sweeps:
        before = f
        f = _sweep(P, da, db, polish)
        sweeps += 1
        if before - f >= tol:
            polish = False
        elif polish:
            return f, sweeps, True
        else:
            polish = True
    return f, sweeps, False


def search(spectral: np.ndarray, da: int, db: int, m: int, rng: np.random.Generator,
           max_sweeps: int, tol: float) -> SearchRun:
    """One restart from a random isometry; ``spectral`` is ``sqrt(L) V^T``.

    Columns of ``spectral`` are ordered side-A-first and the returned rows
    use the same ordering.
    """
    r = spectral.shape[0]
    swap = db < da
    if swap:
        spectral = spectral.reshape(r, da, db).transpose(0, 2, 1).reshape(r, -1)
        da, db = db, da
    P = np.ascontiguousarray(random_isometry(rng, m, r) @ spectral)
    f, sweeps, converged = _descend(P, da, db, max_sweeps, tol)
    if swap:
        P = P.reshape(m, da, db).transpose(0, 2, 1).reshape(m, -1)
    return SearchRun(f, P, converged, sweeps)
