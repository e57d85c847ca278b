"""Smallest-eigenpair solvers for symmetric (cyclic-)tridiagonal matrices.

The non-cyclic path is LAPACK's bisection + inverse iteration
(stebz/stein via scipy.linalg.eigh_tridiagonal); every solve is then
cross-checked with the local Sturm counter so the returned value
provably brackets the smallest eigenvalue within tol_lambda.  Cyclic
matrices have no LAPACK route: there we run inverse iteration with a
Sherman-Morrison rank-one-corrected tridiagonal factorization, seeded
at the Gershgorin lower bound, with Rayleigh-quotient refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded, solveh_banded

from .errors import NoConvergence, NonFinite

RESIDUAL_TOL = 1e-8
DEFAULT_TOL_LAMBDA = 1e-10


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix, optionally with a cyclic corner
    coupling entries 1 and n."""
    diag: np.ndarray
    offdiag: np.ndarray
    corner: float | None = None

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if d.ndim != 1 or d.size < 1:
            raise ValueError("diag must be a nonempty 1-D vector")
        if e.shape != (d.size - 1,):
            raise ValueError("offdiag must have length n - 1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise NonFinite("matrix entries must be finite")
        if self.corner is not None and not np.isfinite(self.corner):
            raise NonFinite("corner must be finite")

    @property
    def n(self):
        return self.diag.size

    def matvec(self, v):
        out = self.diag * v
        if self.n > 1:
            out[:-1] += self.offdiag * v[1:]
            out[1:] += self.offdiag * v[:-1]
        if self.corner is not None and self.n > 1:
            out[0] += self.corner * v[-1]
            out[-1] += self.corner * v[0]
        return out

    def inf_norm(self):
        a = np.abs(self.diag).copy()
        if self.n > 1:
            a[:-1] += np.abs(self.offdiag)
            a[1:] += np.abs(self.offdiag)
        if self.corner is not None and self.n > 1:
            a[0] += abs(self.corner)
            a[-1] += abs(self.corner)
        return float(a.max())

    def gershgorin(self):
        r = np.zeros(self.n)
        if self.n > 1:
            r[:-1] += np.abs(self.offdiag)
            r[1:] += np.abs(self.offdiag)
        if self.corner is not None and self.n > 1:
            r[0] += abs(self.corner)
            r[-1] += abs(self.corner)
        return float((self.diag - r).min()), float((self.diag + r).max())

    def dense(self):
        a = np.diag(self.diag)
        if self.n > 1:
            a += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
            if self.corner is not None:
                a[0, -1] += self.corner
                a[-1, 0] += self.corner
        return a


@dataclass(frozen=True)
class EigenPair:
    lam: float
    vector: np.ndarray
    residual: float           # ||T v - lam v||_2 / ||T||_inf


def sturm_count(T: SymTridiag, lam: float) -> int:
    """Number of eigenvalues of a non-cyclic T strictly below lam.

    Standard LDL^T sign recurrence; zero pivots are nudged by a tiny
    offdiagonal-scaled amount, the usual underflow guard.
    """
    if T.corner is not None:
        raise ValueError("Sturm counting applies to non-cyclic matrices")
    d = T.diag
    e = T.offdiag
    eps = np.finfo(float).eps
    count = 0
    piv = d[0] - lam
    if piv < 0:
        count += 1
    for i in range(1, T.n):
        if piv == 0.0:
            piv = eps * max(abs(e[i - 1]), eps)
        piv = (d[i] - lam) - e[i - 1] * e[i - 1] / piv
        if piv < 0:
            count += 1
    return count


def _residual(T, lam, v):
    return float(np.linalg.norm(T.matvec(v) - lam * v) / max(T.inf_norm(), 1e-300))


def _fix_sign(v):
    i = int(np.argmax(np.abs(v)))
    return v if v[i] > 0 else -v


def _solve_shifted(T, sigma, rhs):
    """(T - sigma I)^{-1} rhs via banded LU (non-cyclic part only)."""
    n = T.n
    ab = np.zeros((3, n))
    ab[1] = T.diag - sigma
    if n > 1:
        ab[0, 1:] = T.offdiag
        ab[2, :-1] = T.offdiag
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def _mmatrix_inverse_step(T, sigma, rhs):
    """(T - sigma I)^{-1} rhs by banded Cholesky (no pivoting).

    For sigma strictly below the smallest eigenvalue of a T with
    negative offdiagonals, T - sigma I is an M-matrix: the substitution
    sweeps then involve no cancellation, so a nonnegative rhs yields a
    strictly positive result even in floating point.
    """
    ab = np.zeros((2, T.n))
    ab[0, 1:] = T.offdiag
    ab[1] = T.diag - sigma
    return solveh_banded(ab, rhs, check_finite=False)


def _smallest_eig_lapack(T: SymTridiag, tol_lambda: float) -> EigenPair:
    if T.n == 1:
        return EigenPair(float(T.diag[0]), np.array([1.0]), 0.0)
    w, v = eigh_tridiagonal(T.diag, T.offdiag, select="i", select_range=(0, 0),
                            tol=tol_lambda, check_finite=False)
    lam = float(w[0])
    vec = _fix_sign(v[:, 0].copy())
    if not np.isfinite(lam) or not np.all(np.isfinite(vec)):
        raise NonFinite("eigensolve produced non-finite values")
    # contract check: lam brackets the smallest eigenvalue within
    # tol_lambda (widened to the backward-error scale eps*||T|| below
    # which Sturm counts of the rounded matrix are not meaningful)
    delta = max(tol_lambda, 64 * np.finfo(float).eps * T.inf_norm())
    if sturm_count(T, lam - delta) != 0 or sturm_count(T, lam + delta) < 1:
        raise NoConvergence(1, "Sturm bracket validation failed")
    # one certified inverse-iteration step from just below the bracket:
    # regenerates entries that inverse iteration inside LAPACK flushed
    # to zero, and the Rayleigh quotient sharpens lam to machine level
    seed = np.maximum(vec, 0.0)
    if not np.any(seed > 0):
        seed = np.ones(T.n)
    for widen in range(6):
        sigma = lam - delta * 2.0 ** widen
        try:
            cand = _mmatrix_inverse_step(T, sigma, seed)
        except np.linalg.LinAlgError:
            continue
        norm = np.linalg.norm(cand)
        if np.all(np.isfinite(cand)) and norm > 0:
            vec = cand / norm
            break
    lam = float(vec @ T.matvec(vec))
    res = _residual(T, lam, vec)
    if res > RESIDUAL_TOL:
        for _ in range(5):
            try:
                vec = _solve_shifted(T, lam - delta, vec)
            except np.linalg.LinAlgError:
                break
            vec /= np.linalg.norm(vec)
            lam = float(vec @ T.matvec(vec))
            res = _residual(T, lam, vec)
            if res <= RESIDUAL_TOL:
                break
        vec = _fix_sign(vec)
    if res > RESIDUAL_TOL:
        raise NoConvergence(5, f"residual {res:.2e}")
    return EigenPair(lam, vec, res)


def _solve_cyclic_shifted(T, sigma, rhs, cache):
    """Sherman-Morrison solve of (C - sigma I) x = rhs for cyclic C.

    C = B + beta u u^T with u = e_1 + e_n and B the tridiagonal part
    with beta subtracted from the two corner diagonal entries.
    """
    n = T.n
    beta = T.corner
    ab = cache.get("ab")
    if ab is None or cache.get("sigma") != sigma:
        d = T.diag.copy()
        d[0] -= beta
        d[-1] -= beta
        ab = np.zeros((3, n))
        ab[1] = d - sigma
        ab[0, 1:] = T.offdiag
        ab[2, :-1] = T.offdiag
        u = np.zeros(n)
        u[0] = u[-1] = 1.0
        z = solve_banded((1, 1), ab, u, check_finite=False)
        cache.update(ab=ab, sigma=sigma, z=z,
                     denom=1.0 + beta * (z[0] + z[-1]))
    y = solve_banded((1, 1), cache["ab"], rhs, check_finite=False)
    z = cache["z"]
    denom = cache["denom"]
    if denom == 0.0 or not np.isfinite(denom):
        raise np.linalg.LinAlgError("singular rank-one correction")
    return y - z * (beta * (y[0] + y[-1]) / denom)


def cyclic_inertia_below(T: SymTridiag, lam: float) -> int:
    """Number of eigenvalues of a cyclic T strictly below lam.

    Bordered LDL^T: rows are eliminated in order while the last column
    (carrying the corner coupling) is kept as a dense border, so the
    pivot signs of (T - lam I) come out in O(n); negative pivot count
    equals the eigenvalue count by Sylvester's law.
    """
    if T.corner is None:
        return sturm_count(T, lam)
    n = T.n
    d = T.diag
    e = T.offdiag
    beta = T.corner
    eps = np.finfo(float).eps
    guard = eps * max(T.inf_norm(), eps)
    count = 0
    piv = d[0] - lam
    fill = beta                       # current A[i, n-1] after elimination
    acc = 0.0                         # accumulated border Schur correction
    for i in range(n - 2):
        if piv == 0.0:
            piv = guard
        if piv < 0:
            count += 1
        acc += fill * fill / piv
        ratio = e[i] / piv
        nxt_fill = (e[n - 2] if i + 1 == n - 2 else 0.0) - ratio * fill
        piv = (d[i + 1] - lam) - e[i] * ratio
        fill = nxt_fill
    if piv == 0.0:
        piv = guard
    if piv < 0:
        count += 1
    acc += fill * fill / piv
    last = (d[n - 1] - lam) - acc
    if last < 0:
        count += 1
    return count


def _smallest_eig_cyclic(T: SymTridiag, tol_lambda: float,
                         max_iterations: int = 60) -> EigenPair:
    # bracket the smallest eigenvalue by bisection on the cyclic inertia
    # count, starting from the Gershgorin window
    lo, hi = T.gershgorin()
    width_floor = max(tol_lambda, 64 * np.finfo(float).eps * T.inf_norm())
    while hi - lo > width_floor:
        mid = 0.5 * (lo + hi)
        if cyclic_inertia_below(T, mid) >= 1:
            hi = mid
        else:
            lo = mid
    sigma = lo - width_floor          # certified just below the eigenvalue
    v = np.ones(T.n) / math.sqrt(T.n)
    cache = {}
    lam = float(v @ T.matvec(v))
    for _ in range(max_iterations):
        try:
            w = _solve_cyclic_shifted(T, sigma, v, cache)
        except np.linalg.LinAlgError:
            sigma -= width_floor
            cache.clear()
            continue
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0.0:
            raise NonFinite("inverse iteration produced non-finite vector")
        v = w / norm
        lam = float(v @ T.matvec(v))   # Rayleigh-quotient refinement
        if _residual(T, lam, v) <= RESIDUAL_TOL:
            v = _fix_sign(v)
            return EigenPair(lam, v, _residual(T, lam, v))
    raise NoConvergence(max_iterations, "cyclic inverse iteration")


def smallest_eig(T: SymTridiag, tol_lambda: float = DEFAULT_TOL_LAMBDA) -> EigenPair:
    """Principal (smallest) eigenpair; the vector's global sign is fixed
    so that its largest-magnitude entry is positive, which makes it
    entrywise positive for matrices with nonpositive offdiagonals."""
    if tol_lambda <= 0:
        raise ValueError("tol_lambda must be positive")
    if T.corner is None or T.n == 1:
        if T.corner is not None and T.n == 1:
            return EigenPair(float(T.diag[0] + 2 * T.corner), np.array([1.0]), 0.0)
        return _smallest_eig_lapack(T, tol_lambda)
    if T.n == 2:
        # corner doubles the coupling; fall back to a dense 2x2 solve
        a = T.dense()
        w, v = np.linalg.eigh(a)
        return EigenPair(float(w[0]), _fix_sign(v[:, 0]), 0.0)
    return _smallest_eig_cyclic(T, tol_lambda)
