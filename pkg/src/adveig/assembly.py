"""Finite-difference assembly of the eigenvalue problems.

Everything is discretized in the transformed w-form -w'' + q(s,x) w
with q = s^2 (m')^2 + s m'' + c, never in the e^{2sm}-weighted form:
that is the central numerical-stability decision, since e^{2sm} would
overflow long before the interesting values of s.

Grids are vertex-centered.  A Neumann/Robin end keeps its boundary node
and eliminates the ghost point through the boundary condition
w'(boundary) = g * w(boundary); the resulting non-symmetric boundary
rows are symmetrized by the similarity transform that scales boundary
unknowns by sqrt(2) (eigenvalues unchanged, boundary entries of the
eigenvector scale back by sqrt(2)).  A Dirichlet end drops its node.
With n the matrix dimension this gives h = (b-a)/(n-1) when both ends
are kept and h = (b-a)/(n+1) when both are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse, NumericalError, ValidationError
from .profile import AdvectionProfile, PeriodicBC, Potential, RobinBC
from .spectral import DEFAULT_TOL_LAMBDA, EigenPair, SymTridiag, smallest_eig

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class SubBC:
    """Closure at one end of a sub-interval problem: N, D, or R with the
    inherited (hbar, ell) pair of the global boundary condition."""
    kind: str
    hbar: float | None = None
    ell: float | None = None

    def __post_init__(self):
        if self.kind not in ("N", "D", "R"):
            raise ValidationError(f"unknown sub-boundary kind {self.kind!r}")
        if self.kind == "R":
            if self.hbar is None or self.ell is None:
                raise ValidationError("R closure needs (hbar, ell)")
            if self.hbar < 0 or self.ell < 0 or self.hbar + self.ell <= 0:
                raise ValidationError("R closure needs hbar, ell >= 0, hbar+ell > 0")

    @staticmethod
    def N():
        return SubBC("N")

    @staticmethod
    def D():
        return SubBC("D")

    @staticmethod
    def R(hbar, ell):
        return SubBC("R", float(hbar), float(ell))


@dataclass(frozen=True)
class DiscreteOperator:
    matrix: SymTridiag
    grid: dict                      # {a, b, n, h}; n is the matrix dimension
    nodes: np.ndarray = field(repr=False)   # all nodes incl. dropped Dirichlet ones
    kept: slice = field(repr=False)
    closure: str = ""
    scales: tuple = (1.0, 1.0)      # sqrt(2) desymmetrization at kept ends
    q_range: tuple = (0.0, 0.0)
    kind: str = "subinterval"       # transformed | subinterval | periodic
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def kept_nodes(self):
        return self.nodes[self.kept]


def _closure_g(sub: SubBC, side: str, s_mprime: float = 0.0):
    """Ghost-elimination coefficient g in w'(end) = g w(end), or None for
    a Dirichlet end.  s_mprime carries the transformed-problem term."""
    if sub.kind == "D" or (sub.kind == "R" and sub.hbar == 0.0):
        return None
    if sub.kind == "N":
        beta = 0.0
    else:
        beta = sub.ell / sub.hbar
    return s_mprime + beta if side == "left" else s_mprime - beta


def _build(a, b, qfun, n, g_left, g_right, kind, closure, meta):
    """Assemble the symmetric tridiagonal operator for -w'' + q w on [a,b].

    g_left/g_right are the Robin ghost coefficients or None for
    Dirichlet row removal; n is the matrix dimension.
    """
    if n < 4:
        raise ValidationError("grid too small (need n >= 4)")
    n_nodes = n + (g_left is None) + (g_right is None)
    h = (b - a) / (n_nodes - 1)
    nodes = a + h * np.arange(n_nodes)
    nodes[-1] = b
    kept = slice(1 if g_left is None else 0,
                 n_nodes - 1 if g_right is None else n_nodes)
    x = nodes[kept]
    q = np.asarray(qfun(x), dtype=float)
    qmax = float(q.max())
    if h * math.sqrt(max(qmax, 0.0)) > 0.5:
        raise GridTooCoarse(h, max(qmax, 0.0))

    diag = 2.0 / h**2 + q
    offdiag = np.full(n - 1, -1.0 / h**2)
    scale_left = scale_right = 1.0
    # ghost slope coefficient sinh(g h)/h instead of g: exact for the
    # model boundary exponential e^{g x}, identical to g as g h -> 0
    if g_left is not None:
        if abs(g_left) * h > 0.5:
            raise GridTooCoarse(h, g_left ** 2)
        diag[0] += 2.0 * math.sinh(g_left * h) / h**2
        offdiag[0] = -_SQRT2 / h**2
        scale_left = _SQRT2
    if g_right is not None:
        if abs(g_right) * h > 0.5:
            raise GridTooCoarse(h, g_right ** 2)
        diag[-1] -= 2.0 * math.sinh(g_right * h) / h**2
        offdiag[-1] = -_SQRT2 / h**2
        scale_right = _SQRT2
    return DiscreteOperator(
        matrix=SymTridiag(diag, offdiag),
        grid={"a": float(a), "b": float(b), "n": n, "h": h},
        nodes=nodes,
        kept=kept,
        closure=closure,
        scales=(scale_left, scale_right),
        q_range=(float(q.min()), qmax),
        kind=kind,
        meta=meta,
    )


def assemble_transformed(profile: AdvectionProfile, c: Potential, bc: RobinBC,
                         s: float, n: int) -> DiscreteOperator:
    """Discrete transformed operator for the full problem at parameter s.

    The transformed Robin closure is w'(0) = (s m'(0) + ell1/hbar1) w(0)
    and w'(1) = (s m'(1) - ell2/hbar2) w(1); hbar = 0 ends drop the
    boundary unknown.  No e^{2sm} weight appears anywhere.
    """
    if s < 0:
        raise ValidationError("s must be >= 0")
    if n < 16:
        raise ValidationError("transformed assembly needs n >= 16")

    def q(x):
        m1 = profile(x, 1)
        return s * s * m1 * m1 + s * profile(x, 2) + c(x)

    g_left = _closure_g(SubBC.R(bc.hbar1, bc.ell1) if bc.hbar1 > 0 else SubBC.D(),
                        "left", s * profile.one_sided(0.0, 1, "right"))
    g_right = _closure_g(SubBC.R(bc.hbar2, bc.ell2) if bc.hbar2 > 0 else SubBC.D(),
                         "right", s * profile.one_sided(1.0, 1, "left"))
    closure = (f"robin(h1={bc.hbar1},l1={bc.ell1},h2={bc.hbar2},l2={bc.ell2}) "
               "ghost-eliminated, transformed")
    meta = {"s": s, "bc": bc, "c_range": c.range,
            "neumann": bc.ell1 == 0.0 and bc.ell2 == 0.0}
    return _build(0.0, 1.0, q, n, g_left, g_right, "transformed", closure, meta)


def assemble_subinterval(c: Potential, a: float, b: float,
                         left: SubBC, right: SubBC, n: int) -> DiscreteOperator:
    """Discretization of -phi'' + c phi on (a, b) with N/D/R closures;
    the s = 0, constant-m special case of the transformed assembly."""
    if not (0.0 <= a < b <= 1.0):
        raise ValidationError("need 0 <= a < b <= 1")
    if left.kind == "R" and a != 0.0:
        raise ValidationError("R closure inherits the global condition at 0")
    if right.kind == "R" and b != 1.0:
        raise ValidationError("R closure inherits the global condition at 1")
    g_left = _closure_g(left, "left")
    g_right = _closure_g(right, "right")
    closure = f"{left.kind}{right.kind} on [{a:g},{b:g}]"
    meta = {"c_range": c.range}
    return _build(a, b, c, n, g_left, g_right, "subinterval", closure, meta)


def assemble_periodic(profile: AdvectionProfile, c: Potential,
                      s: float, n: int) -> DiscreteOperator:
    """Cyclic tridiagonal operator for -w'' + q(s,x) w on the circle."""
    if s < 0:
        raise ValidationError("s must be >= 0")
    if n < 16:
        raise ValidationError("periodic assembly needs n >= 16")
    PeriodicBC().validate(profile, c)
    h = 1.0 / n
    x = h * np.arange(n)
    m1 = profile(x, 1)
    q = s * s * m1 * m1 + s * profile(x, 2) + c(x)
    qmax = float(q.max())
    if h * math.sqrt(max(qmax, 0.0)) > 0.5:
        raise GridTooCoarse(h, max(qmax, 0.0))
    return DiscreteOperator(
        matrix=SymTridiag(2.0 / h**2 + q, np.full(n - 1, -1.0 / h**2),
                          corner=-1.0 / h**2),
        grid={"a": 0.0, "b": 1.0, "n": n, "h": h},
        nodes=x,
        kept=slice(0, n),
        closure="periodic wrap",
        scales=(1.0, 1.0),
        q_range=(float(q.min()), qmax),
        kind="periodic",
        meta={"s": s, "c_range": c.range},
    )


def principal_eigen(op: DiscreteOperator,
                    tol_lambda: float = DEFAULT_TOL_LAMBDA) -> EigenPair:
    """Principal eigenpair of an assembled operator.

    The returned vector holds the eigenfunction values at the kept grid
    nodes (boundary sqrt(2) symmetrization undone), normalized so the
    trapezoid-rule integral of w^2 over the full grid equals 1.
    """
    pair = smallest_eig(op.matrix, tol_lambda)
    w = pair.vector.copy()
    w[0] *= op.scales[0]
    w[-1] *= op.scales[1]
    x, full = _full_grid_function(op, w)
    norm = math.sqrt(_trapz_sq(op, x, full))
    w /= norm
    if op.kind == "transformed" and op.meta.get("neumann"):
        # continuum bound min c <= lambda^N(s) <= max c; the discrete
        # value may undershoot by the boundary-layer resolution error,
        # so slack 1 marks genuinely unresolved grids
        c_min = op.meta["c_range"][0]
        if pair.lam < c_min - 1.0:
            raise NumericalError(
                f"Neumann eigenvalue {pair.lam:.6g} fell below min c - 1 = "
                f"{c_min - 1.0:.6g}; the grid does not resolve the boundary "
                "layers at this s")
    return EigenPair(pair.lam, w, pair.residual)


def _trapz_sq(op, x, w):
    if op.kind == "periodic":
        return float(np.sum(w**2) * op.grid["h"])  # uniform weights on the circle
    return float(np.trapezoid(w**2, x))


def _full_grid_function(op, w_kept):
    full = np.zeros(op.nodes.size)
    full[op.kept] = w_kept
    return op.nodes, full


def eigenfunction_on_grid(op: DiscreteOperator, pair: EigenPair):
    """(x, w) on the full node set, zeros at removed Dirichlet nodes."""
    return _full_grid_function(op, pair.vector)
