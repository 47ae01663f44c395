"""Hot loops of the roof search.

Every optimisation in this package reduces to the same problem. Take a stack of
``N`` complex matrices ``M_i`` of shape ``(a, k)``. Minimise or maximise

    sum_i  g(M_i),    g(M) = p log2 p - sum_mu mu log2 mu,

where ``mu`` runs over the eigenvalues of ``M M^H`` and ``p = tr M M^H``. The
search runs over unitary mixings ``M_i -> sum_j U_ij M_j`` of the stack. For a
pure-state decomposition the rows are the unnormalised branch vectors reshaped
to ``(dim_A, dim_rest)`` and ``g`` is ``p_i S(rho_A^i)``. For a rank-1
measurement the rows are the unnormalised post-measurement operators.

The search is cyclic coordinate descent over two-row Givens rotations. Each
pair ``(i, j)`` has a real and an imaginary rotation generator. The line search
first probes ``+-local`` around the current point; if both probes are worse the
minimum is bracketed there and golden-section search refines it. Otherwise a
coarse grid over one period picks the bracket. Only strict improvements are
applied, so the objective is monotone along a run.

Two implementations share this algorithm: numba-compiled scalar loops and a
numpy path that batches the grid evaluations. :func:`qpoly._backend.backend`
selects between them.
"""

import math

import numpy as np

from . import _backend
from ._backend import njit

LN2 = math.log(2.0)
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# rows with squared norm below this carry no probability and are skipped
ZERO_WEIGHT = 1e-28
# minimum objective decrease for a rotation to be applied
MIN_GAIN = 1e-14
# line-search defaults: grid points per period, golden stop width, probe half-width
GRID = 4
XTOL = 1e-3
LOCAL = 0.05
# a candidate angle must beat the incumbent by this much; equal-valued angles
# (the landscape is often periodic) then resolve by evaluation order, which
# keeps the two backends on the same trajectory
TIE = 1e-12


def _coefficients(c, s, mode):
    if mode == 0:
        return c, s, -s, c
    return c, 1j * s, 1j * s, c


# ---------------------------------------------------------------- numba path

@njit
def _xlogx(x):
    if x <= 0.0:
        return 0.0
    return x * math.log(x)


@njit
def _nb_gram2(m):
    a, k = m.shape
    x = 0.0
    y = 0.0
    b = 0j
    if a <= k:
        for t in range(k):
            u = m[0, t]
            v = m[1, t]
            x += u.real * u.real + u.imag * u.imag
            y += v.real * v.real + v.imag * v.imag
            b += u * v.conjugate()
    else:
        for t in range(a):
            u = m[t, 0]
            v = m[t, 1]
            x += u.real * u.real + u.imag * u.imag
            y += v.real * v.real + v.imag * v.imag
            b += u.conjugate() * v
    return x, y, b


@njit
def _nb_term(m):
    a, k = m.shape
    n = a if a <= k else k
    if n == 1:
        return 0.0
    if n == 2:
        x, y, b = _nb_gram2(m)
        p = x + y
        if p <= 0.0:
            return 0.0
        b2 = b.real * b.real + b.imag * b.imag
        half = 0.5 * (x - y)
        mu1 = 0.5 * p + math.sqrt(half * half + b2)
        mu2 = (x * y - b2) / mu1
        if mu2 <= 0.0:
            return 0.0
        return -(_xlogx(mu1 / p) + _xlogx(mu2 / p)) * p / LN2
    g = np.zeros((n, n), dtype=np.complex128)
    if a <= k:
        for r in range(a):
            for s in range(r, a):
                acc = 0j
                for t in range(k):
                    acc += m[r, t] * m[s, t].conjugate()
                g[r, s] = acc
                g[s, r] = acc.conjugate()
    else:
        for r in range(k):
            for s in range(r, k):
                acc = 0j
                for t in range(a):
                    acc += m[t, r].conjugate() * m[t, s]
                g[r, s] = acc
                g[s, r] = acc.conjugate()
    p = 0.0
    for r in range(n):
        p += g[r, r].real
    if p <= 0.0:
        return 0.0
    mu = np.linalg.eigvalsh(g)
    acc = 0.0
    for v in mu:
        acc += _xlogx(v)
    return (_xlogx(p) - acc) / LN2


@njit
def _nb_weight(m):
    acc = 0.0
    for v in m.ravel():
        acc += v.real * v.real + v.imag * v.imag
    return acc


@njit
def _nb_mix(out, x, y, alpha, beta):
    a, k = x.shape
    for r in range(a):
        for t in range(k):
            out[r, t] = alpha * x[r, t] + beta * y[r, t]


@njit
def _nb_pair(mi, mj, theta, mode, ti, tj):
    c = math.cos(theta)
    s = math.sin(theta)
    if mode == 0:
        _nb_mix(ti, mi, mj, c + 0j, s + 0j)
        _nb_mix(tj, mi, mj, -s + 0j, c + 0j)
    else:
        _nb_mix(ti, mi, mj, c + 0j, 1j * s)
        _nb_mix(tj, mi, mj, 1j * s, c + 0j)
    return _nb_term(ti) + _nb_term(tj)


@njit
def _nb_rotate_rows(arr, i, j, theta, mode):
    c = math.cos(theta)
    s = math.sin(theta)
    if mode == 0:
        ai, bi, aj, bj = c + 0j, s + 0j, -s + 0j, c + 0j
    else:
        ai, bi, aj, bj = c + 0j, 1j * s, 1j * s, c + 0j
    for t in range(arr.shape[1]):
        x = arr[i, t]
        y = arr[j, t]
        arr[i, t] = ai * x + bi * y
        arr[j, t] = aj * x + bj * y


@njit
def _nb_search(stack, track, sense, max_steps, tol, grid, xtol, local):
    n = stack.shape[0]
    a = stack.shape[1]
    k = stack.shape[2]
    terms = np.empty(n)
    weights = np.empty(n)
    for i in range(n):
        terms[i] = _nb_term(stack[i])
        weights[i] = _nb_weight(stack[i])
    ti = np.empty((a, k), dtype=np.complex128)
    tj = np.empty((a, k), dtype=np.complex128)
    flat = stack.reshape(n, a * k)
    h = math.pi / grid
    steps = 0
    converged = False
    while True:
        gain = 0.0
        exhausted = False
        for i in range(n):
            if weights[i] < ZERO_WEIGHT:
                continue
            for j in range(i + 1, n):
                if weights[j] < ZERO_WEIGHT:
                    continue
                for mode in range(2):
                    if steps >= max_steps:
                        exhausted = True
                        break
                    steps += 1
                    f0 = sense * (terms[i] + terms[j])
                    best_t = 0.0
                    best_f = f0
                    fm = sense * _nb_pair(stack[i], stack[j], -local, mode, ti, tj)
                    fp = sense * _nb_pair(stack[i], stack[j], local, mode, ti, tj)
                    if fm > f0 and fp > f0:
                        lo = -local
                        hi = local
                    else:
                        if fm < best_f - TIE:
                            best_f = fm
                            best_t = -local
                        if fp < best_f - TIE:
                            best_f = fp
                            best_t = local
                        for q in range(1, grid):
                            f = sense * _nb_pair(stack[i], stack[j], q * h, mode, ti, tj)
                            if f < best_f - TIE:
                                best_f = f
                                best_t = q * h
                        lo = best_t - h
                        hi = best_t + h
                    x1 = hi - GOLDEN * (hi - lo)
                    x2 = lo + GOLDEN * (hi - lo)
                    f1 = sense * _nb_pair(stack[i], stack[j], x1, mode, ti, tj)
                    f2 = sense * _nb_pair(stack[i], stack[j], x2, mode, ti, tj)
                    while hi - lo > xtol:
                        if f1 < f2:
                            hi = x2
                            x2 = x1
                            f2 = f1
                            x1 = hi - GOLDEN * (hi - lo)
                            f1 = sense * _nb_pair(stack[i], stack[j], x1, mode, ti, tj)
                        else:
                            lo = x1
                            x1 = x2
                            f1 = f2
                            x2 = lo + GOLDEN * (hi - lo)
                            f2 = sense * _nb_pair(stack[i], stack[j], x2, mode, ti, tj)
                    if f1 < best_f - TIE:
                        best_f = f1
                        best_t = x1
                    if f2 < best_f - TIE:
                        best_f = f2
                        best_t = x2
                    if best_f < f0 - MIN_GAIN:
                        _nb_rotate_rows(flat, i, j, best_t, mode)
                        _nb_rotate_rows(track, i, j, best_t, mode)
                        old = terms[i] + terms[j]
                        terms[i] = _nb_term(stack[i])
                        terms[j] = _nb_term(stack[j])
                        weights[i] = _nb_weight(stack[i])
                        weights[j] = _nb_weight(stack[j])
                        gain += sense * (old - terms[i] - terms[j])
                if exhausted:
                    break
            if exhausted:
                break
        if exhausted:
            break
        if gain <= tol:
            converged = True
            break
    total = 0.0
    for i in range(n):
        total += terms[i]
    return total, steps, converged


# ---------------------------------------------------------------- numpy path

def _np_xlogx(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > 0.0, x, 1.0)
    return np.where(x > 0.0, x * np.log(safe), 0.0)


def branch_terms(mats):
    """``g`` for every matrix in a batch of shape ``(..., a, k)``."""
    mats = np.asarray(mats, dtype=complex)
    a, k = mats.shape[-2:]
    if min(a, k) == 1:
        return np.zeros(mats.shape[:-2])
    if a <= k:
        gram = mats @ np.conj(np.swapaxes(mats, -1, -2))
    else:
        gram = np.conj(np.swapaxes(mats, -1, -2)) @ mats
    mu = np.linalg.eigvalsh(gram)
    p = np.real(np.trace(gram, axis1=-2, axis2=-1))
    return (_np_xlogx(p) - _np_xlogx(mu).sum(axis=-1)) / LN2


def _np_pair(mi, mj, thetas, mode):
    thetas = np.atleast_1d(thetas)
    c = np.cos(thetas)[:, None, None]
    s = np.sin(thetas)[:, None, None]
    ai, bi, aj, bj = _coefficients(c, s, mode)
    new_i = ai * mi + bi * mj
    new_j = aj * mi + bj * mj
    return branch_terms(new_i) + branch_terms(new_j)


def _np_search(stack, track, sense, max_steps, tol, grid, xtol, local):
    n = stack.shape[0]
    terms = branch_terms(stack)
    weights = np.sum(np.abs(stack.reshape(n, -1)) ** 2, axis=1)
    h = math.pi / grid
    grid_thetas = h * np.arange(1, grid)
    steps = 0
    while True:
        gain = 0.0
        for i in range(n):
            if weights[i] < ZERO_WEIGHT:
                continue
            for j in range(i + 1, n):
                if weights[j] < ZERO_WEIGHT:
                    continue
                for mode in range(2):
                    if steps >= max_steps:
                        return float(terms.sum()), steps, False
                    steps += 1
                    mi, mj = stack[i], stack[j]

                    def f(t):
                        return sense * float(_np_pair(mi, mj, t, mode)[0])

                    f0 = sense * (terms[i] + terms[j])
                    best_t, best_f = 0.0, f0
                    fm, fp = sense * _np_pair(mi, mj, np.array([-local, local]), mode)
                    if fm > f0 and fp > f0:
                        lo, hi = -local, local
                    else:
                        thetas = np.concatenate(([-local, local], grid_thetas))
                        fg = np.concatenate(([fm, fp], sense * _np_pair(mi, mj, grid_thetas, mode)))
                        for q in range(len(fg)):
                            if fg[q] < best_f - TIE:
                                best_t, best_f = float(thetas[q]), float(fg[q])
                        lo, hi = best_t - h, best_t + h
                    x1 = hi - GOLDEN * (hi - lo)
                    x2 = lo + GOLDEN * (hi - lo)
                    f1, f2 = f(x1), f(x2)
                    while hi - lo > xtol:
                        if f1 < f2:
                            hi, x2, f2 = x2, x1, f1
                            x1 = hi - GOLDEN * (hi - lo)
                            f1 = f(x1)
                        else:
                            lo, x1, f1 = x1, x2, f2
                            x2 = lo + GOLDEN * (hi - lo)
                            f2 = f(x2)
                    if f1 < best_f - TIE:
                        best_t, best_f = x1, f1
                    if f2 < best_f - TIE:
                        best_t, best_f = x2, f2
                    if best_f < f0 - MIN_GAIN:
                        c, s = math.cos(best_t), math.sin(best_t)
                        ai, bi, aj, bj = _coefficients(c, s, mode)
                        for arr in (stack, track):
                            x, y = arr[i].copy(), arr[j].copy()
                            arr[i] = ai * x + bi * y
                            arr[j] = aj * x + bj * y
                        old = terms[i] + terms[j]
                        terms[i], terms[j] = branch_terms(stack[[i, j]])
                        weights[i] = np.sum(np.abs(stack[i]) ** 2)
                        weights[j] = np.sum(np.abs(stack[j]) ** 2)
                        gain += sense * (old - terms[i] - terms[j])
        if gain <= tol:
            return float(terms.sum()), steps, True


# ------------------------------------------------------------------ dispatch

def coordinate_search(stack, track, sense, max_steps, tol, grid=GRID, xtol=XTOL, local=LOCAL):
    """Run the Givens coordinate search in place.

    Parameters
    ----------
    stack : complex ndarray, shape (N, a, k)
        Rows to be mixed; modified in place.
    track : complex ndarray, shape (N, t)
        Receives the same row rotations (used to recover the isometry).
    sense : {+1, -1}
        +1 minimises the summed terms, -1 maximises them.
    max_steps : int
        Budget of one-dimensional line searches.
    tol : float
        A sweep improving the objective by no more than this stops the run.
    grid, xtol, local : optional
        Grid points per period, golden-section bracket width at which to stop,
        and half-width of the probe bracket tried around the current point.

    Returns
    -------
    value : float
        Summed terms of the final stack.
    steps : int
        Line searches used.
    converged : bool
        False when the budget ran out before a quiet sweep.
    """
    if _backend.backend() == "numba":
        value, steps, converged = _nb_search(stack, track, float(sense), int(max_steps),
                                             float(tol), int(grid), float(xtol), float(local))
        return float(value), int(steps), bool(converged)
    return _np_search(stack, track, float(sense), int(max_steps), float(tol), int(grid),
                      float(xtol), float(local))


def stack_value(stack):
    """Summed ``g`` over a stack, using the active backend."""
    stack = np.ascontiguousarray(stack, dtype=complex)
    if _backend.backend() == "numba":
        return float(sum(_nb_term(m) for m in stack))
    return float(branch_terms(stack).sum())
