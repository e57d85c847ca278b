"""Shared fixtures and independent oracles for the test suite.

The oracles deliberately use different algorithms than the library:
characteristic-polynomial Sturm sequences with bisection for
tridiagonal eigenvalues, dense numpy eigensolves for cyclic matrices,
and closed-form eigenvalues where they exist.
"""

import math

import numpy as np
import pytest

from adveig.profile import ProfileSpec, SIGN_TAGS


def charpoly_count_below(diag, offdiag, lam):
    """Eigenvalues of the tridiagonal matrix strictly below lam, by sign
    variations of the characteristic-polynomial sequence."""
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    p_prev, p = 1.0, d[0] - lam
    signs = [1.0, p]
    for k in range(1, d.size):
        p_prev, p = p, (d[k] - lam) * p - e[k - 1] ** 2 * p_prev
        # rescale to dodge overflow; only signs matter
        scale = max(abs(p), abs(p_prev), 1.0)
        p, p_prev = p / scale, p_prev / scale
        signs.append(p)
    count = 0
    prev = 1.0
    for v in signs[1:]:
        if v == 0.0:
            v = -prev      # zero counts as a sign change (eigenvalue hit)
        if v * prev < 0:
            count += 1
        prev = v
    return count


def charpoly_smallest(diag, offdiag, tol=1e-12):
    """Smallest eigenvalue by bisection on charpoly_count_below."""
    d = np.asarray(diag, dtype=float)
    e = np.asarray(offdiag, dtype=float)
    r = np.zeros(d.size)
    if d.size > 1:
        r[:-1] += np.abs(e)
        r[1:] += np.abs(e)
    lo, hi = float((d - r).min()), float((d + r).max())
    scale = max(abs(lo), abs(hi), 1.0)
    while hi - lo > tol * scale:
        mid = 0.5 * (lo + hi)
        if charpoly_count_below(d, e, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def reflect_spec(spec: ProfileSpec) -> ProfileSpec:
    """Spec of the reflected profile m(1 - x)."""
    knots = tuple(1.0 - k for k in reversed(spec.knots))
    segments = []
    signs = []
    for seg, tag, a, b in zip(spec.segments, spec.declared_signs,
                              spec.knots, spec.knots[1:]):
        w = b - a
        # coefficients of p(w - u): shift by w, then u -> -u
        shifted = _shift(seg, w)
        segments.append(tuple(c * (-1.0) ** j for j, c in enumerate(shifted)))
        signs.append({1: "decreasing", -1: "increasing", 0: "constant"}[SIGN_TAGS[tag]])
    return ProfileSpec(knots, tuple(reversed(segments)), tuple(reversed(signs)))


def _shift(coeffs, s):
    n = len(coeffs)
    out = [0.0] * n
    for i, c in enumerate(coeffs):
        for j in range(i + 1):
            out[j] += c * math.comb(i, j) * s ** (i - j)
    return out


def scale_spec(spec: ProfileSpec, alpha, beta) -> ProfileSpec:
    """Spec of alpha*m + beta."""
    segments = []
    for seg in spec.segments:
        seg = [alpha * c for c in seg]
        seg[0] += beta
        segments.append(tuple(seg))
    signs = spec.declared_signs if alpha > 0 else tuple(
        {"increasing": "decreasing", "decreasing": "increasing",
         "constant": "constant"}[t] for t in spec.declared_signs)
    return ProfileSpec(spec.knots, tuple(segments), signs)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240813)
