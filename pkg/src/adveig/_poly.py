"""Exact univariate polynomial helpers for sign verification.

Coefficients are ascending-order lists.  The sign machinery runs over
``fractions.Fraction`` so that root counting on a segment is exact for
any float input (floats convert to rationals without loss); degrees are
capped at 8 by the profile layer, so cost is irrelevant.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def as_fractions(coeffs):
    return [Fraction(c) for c in coeffs]


def trim(p):
    """Drop trailing zero coefficients (exact zeros only)."""
    i = len(p)
    while i > 0 and p[i - 1] == 0:
        i -= 1
    return p[:i]


def is_zero(p):
    return len(trim(p)) == 0


def degree(p):
    return len(trim(p)) - 1


def deriv(p, order=1):
    p = list(p)
    for _ in range(order):
        p = [k * c for k, c in enumerate(p)][1:]
    return p


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _divmod(num, den):
    num = trim(list(num))
    den = trim(list(den))
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(num) - len(den) + 1, 1)
    rem = list(num)
    dn = len(den) - 1
    lead = den[-1]
    while len(trim(rem)) - 1 >= dn and trim(rem):
        rem = trim(rem)
        shift = len(rem) - 1 - dn
        factor = rem[-1] / lead
        quot[shift] = factor
        for i, c in enumerate(den):
            rem[shift + i] -= factor * c
    return trim(quot), trim(rem)


def _gcd(a, b):
    a, b = trim(list(a)), trim(list(b))
    while b:
        _, r = _divmod(a, b)
        a, b = b, trim(r)
    if a:  # monic normalization
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def squarefree_odd_part(p):
    """Product of the irreducible factors of odd multiplicity.

    Sign changes of p happen exactly at real roots of odd multiplicity,
    so p keeps one sign on an interval iff this part has no root there.
    """
    p = trim(as_fractions(p))
    if not p or degree(p) == 0:
        return p
    parts = []  # squarefree factors by multiplicity (Yun)
    g = _gcd(p, deriv(p))
    c, _ = _divmod(p, g)
    while degree(c) > 0:
        d = _gcd(c, g)
        factor, _ = _divmod(c, d)
        parts.append(factor)
        c = d
        g, _ = _divmod(g, d)
    odd = [Fraction(1)]
    for mult, factor in enumerate(parts, start=1):
        if mult % 2 == 1 and degree(factor) > 0:
            odd = poly_mul(odd, factor)
    return trim(odd)


def poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return out


def deflate_root(p, r):
    """Divide out (x - r) while r is an exact root."""
    p = trim(list(p))
    while p and degree(p) >= 1 and evaluate(p, r) == 0:
        p, rem = _divmod(p, [-r, Fraction(1)])
        assert is_zero(rem)
    return p


def sturm_chain(p):
    chain = [trim(list(p)), trim(deriv(p))]
    while chain[-1] and degree(chain[-1]) >= 0:
        _, r = _divmod(chain[-2], chain[-1])
        r = trim(r)
        if not r:
            break
        chain.append([-c for c in r])
    return [q for q in chain if q]


def sign_variations(chain, x):
    signs = []
    for q in chain:
        v = evaluate(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_open(p, a, b):
    """Number of distinct real roots of p in the open interval (a, b).

    p must not be identically zero.  Endpoint roots are deflated first,
    then the classical Sturm count applies.
    """
    a, b = Fraction(a), Fraction(b)
    p = trim(as_fractions(p))
    if not p:
        raise ValueError("zero polynomial")
    p = deflate_root(p, a)
    p = deflate_root(p, b)
    if degree(p) < 1:
        return 0
    chain = sturm_chain(p)
    return sign_variations(chain, a) - sign_variations(chain, b)


def sign_on_open_interval(p, width):
    """Classify the sign of p on (0, width): '+', '-', '0' or 'mixed'.

    '+' means p >= 0 with p > 0 somewhere (and symmetrically '-');
    touching zero at isolated points, including the endpoints, is
    allowed.  Exact for rational (e.g. float) coefficients.
    """
    pf = trim(as_fractions(p))
    if not pf:
        return "0"
    odd = squarefree_odd_part(pf)
    if degree(odd) >= 1 and count_roots_open(odd, 0, width) > 0:
        return "mixed"
    # constant sign inside; sample away from the finitely many roots
    width = Fraction(width)
    for k in range(2, 2 + len(pf) + 2):
        v = evaluate(pf, width / k)
        if v != 0:
            return "+" if v > 0 else "-"
    return "0"  # unreachable for nonzero p of degree <= len(pf)


# -- float-side helpers -------------------------------------------------

def poly_extrema_values(coeffs, width):
    """Values of the polynomial at [0, width] endpoints and interior
    critical points (float arithmetic; used for range metadata only)."""
    c = np.asarray(coeffs, dtype=float)
    vals = [float(np.polynomial.polynomial.polyval(0.0, c)),
            float(np.polynomial.polynomial.polyval(width, c))]
    d = np.polynomial.polynomial.polyder(c)
    if d.size and np.any(d != 0):
        roots = np.roots(d[::-1])
        for r in roots:
            if abs(r.imag) < 1e-12 and 0 < r.real < width:
                vals.append(float(np.polynomial.polynomial.polyval(r.real, c)))
    return vals


def poly_max_abs(coeffs, width):
    """max |p| over [0, width] (float arithmetic)."""
    return max(abs(v) for v in poly_extrema_values(coeffs, width))
