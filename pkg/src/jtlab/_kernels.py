"""Hot numeric kernels for the best-approximation solver.

Every kernel is written in the numba-compatible subset of numpy.  When numba
is importable and ``JTLAB_NO_NUMBA`` is unset (or ``0``), the kernels are
compiled with ``@njit``; otherwise the identical Python source runs directly.
``pure(fn)`` always returns the uncompiled version.

Factor layout is passed as an ``int64`` block table with rows
``(kind, offset, rows, cols)``; coordinates are flat ``complex128`` vectors.
Coefficient vectors are realified: ``lam[2i] + 1j * lam[2i + 1]``.
"""

from __future__ import annotations

import os
import types

import numpy as np

MATRIX = 0
SPIN = 1

_FLAG = os.environ.get("JTLAB_NO_NUMBA", "0").strip().lower()
try:
    if _FLAG not in ("", "0", "false", "no"):
        raise ImportError("disabled by JTLAB_NO_NUMBA")
    import numba

    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False


_KERNELS: dict[str, object] = {}


def _jit(fn):
    _KERNELS[fn.__name__] = fn
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


_PURE_NS: dict | None = None


def pure(fn):
    """Uncompiled version of a kernel whose callees are uncompiled as well."""
    global _PURE_NS
    name = getattr(fn, "__name__", None)
    if not USE_NUMBA or name not in _KERNELS:
        return getattr(fn, "py_func", fn)
    if _PURE_NS is None:
        ns = dict(globals())
        for k, f in _KERNELS.items():
            ns[k] = types.FunctionType(f.__code__, ns, k, f.__defaults__, f.__closure__)
        _PURE_NS = ns
    return _PURE_NS[name]


@_jit
def matrix_top_singular(A):
    m, n = A.shape
    if m == 1 or n == 1:
        acc = 0.0
        for i in range(m):
            for j in range(n):
                acc += A[i, j].real ** 2 + A[i, j].imag ** 2
        return np.sqrt(acc)
    if m <= n:
        G = A @ np.conj(A).T
    else:
        G = np.conj(A).T @ A
    if G.shape[0] == 2:
        a = G[0, 0].real
        d = G[1, 1].real
        b2 = G[0, 1].real ** 2 + G[0, 1].imag ** 2
        lam = 0.5 * (a + d + np.sqrt((a - d) ** 2 + 4.0 * b2))
    else:
        lam = np.linalg.eigvalsh(G)[-1]
    return np.sqrt(max(lam, 0.0))


@_jit
def spin_block_norm(v):
    s = 0.0
    tr = 0.0
    ti = 0.0
    for j in range(v.shape[0]):
        a = v[j].real
        b = v[j].imag
        s += a * a + b * b
        tr += a * a - b * b
        ti += 2.0 * a * b
    disc = s * s - (tr * tr + ti * ti)
    if disc < 0.0:
        disc = 0.0
    return np.sqrt(s + np.sqrt(disc))


@_jit
def block_norm(coords, blocks):
    best = 0.0
    for b in range(blocks.shape[0]):
        kind = blocks[b, 0]
        off = blocks[b, 1]
        m = blocks[b, 2]
        n = blocks[b, 3]
        if kind == MATRIX:
            val = matrix_top_singular(coords[off:off + m * n].copy().reshape(m, n))
        else:
            val = spin_block_norm(coords[off:off + m])
        if val > best:
            best = val
    return best


@_jit
def residual_norm(lam, x, V, blocks):
    """``|| x - sum_i lam_i V[i] ||`` in the factor norm."""
    r = x.copy()
    for i in range(V.shape[0]):
        c = lam[2 * i] + 1j * lam[2 * i + 1]
        for j in range(x.shape[0]):
            r[j] -= c * V[i, j]
    return block_norm(r, blocks)


@_jit
def nelder_mead(x0, step, x, V, blocks, max_iters, xatol, fatol):
    """Adaptive Nelder-Mead on ``residual_norm``; returns (point, value, evals)."""
    dim = x0.shape[0]
    alpha = 1.0
    gamma = 1.0 + 2.0 / dim
    rho = 0.75 - 1.0 / (2.0 * dim)
    sigma = 1.0 - 1.0 / dim
    S = np.empty((dim + 1, dim))
    F = np.empty(dim + 1)
    S[0] = x0
    for k in range(dim):
        S[k + 1] = x0
        S[k + 1, k] += step
    for k in range(dim + 1):
        F[k] = residual_norm(S[k], x, V, blocks)
    evals = dim + 1
    for _ in range(max_iters):
        order = np.argsort(F)
        S = S[order]
        F = F[order]
        spread = 0.0
        for k in range(1, dim + 1):
            for j in range(dim):
                d = abs(S[k, j] - S[0, j])
                if d > spread:
                    spread = d
        if spread <= xatol and F[dim] - F[0] <= fatol:
            break
        c = np.zeros(dim)
        for k in range(dim):
            c += S[k]
        c /= dim
        xr = c + alpha * (c - S[dim])
        fr = residual_norm(xr, x, V, blocks)
        evals += 1
        if fr < F[0]:
            xe = c + gamma * (xr - c)
            fe = residual_norm(xe, x, V, blocks)
            evals += 1
            if fe < fr:
                S[dim] = xe
                F[dim] = fe
            else:
                S[dim] = xr
                F[dim] = fr
        elif fr < F[dim - 1]:
            S[dim] = xr
            F[dim] = fr
        else:
            if fr < F[dim]:
                xc = c + rho * (xr - c)
            else:
                xc = c + rho * (S[dim] - c)
            fc = residual_norm(xc, x, V, blocks)
            evals += 1
            if fc < min(fr, F[dim]):
                S[dim] = xc
                F[dim] = fc
            else:
                for k in range(1, dim + 1):
                    S[k] = S[0] + sigma * (S[k] - S[0])
                    F[k] = residual_norm(S[k], x, V, blocks)
                evals += dim
    best = np.argmin(F)
    return S[best].copy(), F[best], evals


@_jit
def refine(x0, step, x, V, blocks, max_iters, xatol, fatol, restarts):
    """Nelder-Mead restarted from its own optimum until it stops improving."""
    p, f, evals = nelder_mead(x0, step, x, V, blocks, max_iters, xatol, fatol)
    s = step
    for _ in range(restarts):
        s = max(0.1 * s, 100.0 * xatol)
        q, g, e = nelder_mead(p, s, x, V, blocks, max_iters, xatol, fatol)
        evals += e
        if g < f - fatol:
            p = q
            f = g
        elif g <= f:
            p = q
            f = g
            break
        else:
            break
    return p, f, evals


@_jit
def multistart(starts, step, x, V, blocks, max_iters, xatol, fatol, restarts):
    n = starts.shape[0]
    P = np.empty_like(starts)
    Fv = np.empty(n)
    total = 0
    for k in range(n):
        p, f, e = refine(starts[k], step, x, V, blocks, max_iters, xatol, fatol, restarts)
        P[k] = p
        Fv[k] = f
        total += e
    return P, Fv, total


@_jit
def sublevel_extent(center, dirs, level, x, V, blocks, tmax, bisect_iters):
    """Largest ``t`` in ``[0, tmax]`` along each unit direction with f <= level.

    The objective is convex, so each sublevel section is an interval
    containing ``t = 0`` whenever ``f(center) <= level``.
    """
    out = np.zeros(dirs.shape[0])
    for k in range(dirs.shape[0]):
        d = dirs[k]
        hi = tmax
        if residual_norm(center + hi * d, x, V, blocks) <= level:
            out[k] = hi
            continue
        lo = 0.0
        for _ in range(bisect_iters):
            mid = 0.5 * (lo + hi)
            if residual_norm(center + mid * d, x, V, blocks) <= level:
                lo = mid
            else:
                hi = mid
        out[k] = lo
    return out


@_jit
def batch_block_norm(C, blocks):
    out = np.empty(C.shape[0])
    for k in range(C.shape[0]):
        out[k] = block_norm(C[k], blocks)
    return out
