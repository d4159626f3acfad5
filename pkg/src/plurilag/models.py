"""Catalog of quad-equations, octahedron relations and Lagrangian models.

Quad models work with multi-affine (denominator-cleared) residuals.  The
hyperbolic model ``q3d0`` is affine in ``X = exp(2x)`` and takes ``X`` as
its field variable.  The two Lagrangian families are the cross-ratio model
``q1d0`` (closed-form legs) and the exponential model ``exp`` with its
``gamma`` deformation (legs known as derivatives; the Lagrangians come from
quadrature).
"""
from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError, SingularDataError, UnknownModelError
from .forms import CubeFields, Legs, ThreePointForm
from .lattice import OCTAHEDRON_LABELS
from .solve import antiderivative

QUAD_SLOTS = ("x", "xi", "xij", "xj")


class Model:
    name = ""
    has_quad = False
    has_lagrangian = False
    alpha_box = (0.5, 3.0)

    @property
    def params(self) -> dict:
        return {}

    def sample_alpha(self, rng, n=3) -> tuple:
        lo, hi = self.alpha_box
        return tuple(float(a) for a in rng.uniform(lo, hi, n))

    def __repr__(self):
        extra = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{type(self).__name__}({extra})"


# -- quad-equations ------------------------------------------------------------------

class QuadModel(Model):
    """A quad-equation ``Q(x, x_i, x_ij, x_j; a_i, a_j) = 0`` and its octahedron relation."""

    has_quad = True
    field_box = (-2.0, 2.0)

    def quad_residual(self, x, xi, xij, xj, ai, aj) -> float:
        raise NotImplementedError

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha) -> list:
        raise NotImplementedError

    def check_fields(self, *values):
        for v in values:
            if not math.isfinite(v):
                raise DomainError(f"non-finite field value {v!r}")

    def residual(self, x, xi, xij, xj, ai, aj) -> float:
        self.check_fields(x, xi, xij, xj)
        return self.quad_residual(x, xi, xij, xj, ai, aj)

    def solve_for(self, unknown: str, values: Mapping, ai, aj) -> float:
        """Root of the quad residual in the slot ``unknown``, the other three given."""
        if unknown not in QUAD_SLOTS:
            raise DomainError(f"unknown slot {unknown!r}; expected one of {QUAD_SLOTS}")
        args = {k: float(values[k]) for k in QUAD_SLOTS if k != unknown}
        self.check_fields(*args.values())

        def r(t):
            return self.quad_residual(**args, **{unknown: t}, ai=ai, aj=aj)

        r0, r1, rm = r(0.0), r(1.0), r(-1.0)
        coef = r1 - r0
        scale = max(1.0, abs(r0), abs(r1), abs(rm))
        if abs(coef) <= 1e-13 * scale:
            raise SingularDataError(f"coefficient of {unknown} vanishes")
        return -r0 / coef

    def octahedron_residual(self, xi, xj, xk, xij, xjk, xik, alpha) -> float:
        self.check_fields(xi, xj, xk, xij, xjk, xik)
        return float(sum(self.octahedron_terms(xi, xj, xk, xij, xjk, xik, alpha)))

    def octahedron_scale(self, xi, xj, xk, xij, xjk, xik, alpha) -> float:
        return max(1.0, float(sum(abs(t) for t in self.octahedron_terms(xi, xj, xk, xij, xjk, xik, alpha))))

    def sample_fields(self, rng, n=4) -> tuple:
        lo, hi = self.field_box
        return tuple(float(v) for v in rng.uniform(lo, hi, n))


class Q1d0(QuadModel):
    name = "q1d0"

    def quad_residual(self, x, xi, xij, xj, ai, aj):
        return aj * (x - xi) * (xij - xj) - ai * (xi - xij) * (xj - x)

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha):
        return [
            (xij - xi) * (xjk - xj) * (xik - xk),
            -(xij - xj) * (xjk - xk) * (xik - xi),
        ]


class Q1d1(QuadModel):
    name = "q1d1"

    def quad_residual(self, x, xi, xij, xj, ai, aj):
        return aj * (x - xi + ai) * (xij - xj + ai) - ai * (xi - xij - aj) * (xj - x - aj)

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha):
        ai, aj, ak = alpha
        return [
            (xij - xi + aj) * (xjk - xj + ak) * (xik - xk + ai),
            -(xij - xj + ai) * (xjk - xk + aj) * (xik - xi + ak),
        ]


class Q3d0(QuadModel):
    """Hyperbolic cross-ratio equation written in ``X = exp(2x)``."""

    name = "q3d0"
    alpha_box = (0.1, 1.0)
    field_box = (-0.5, 0.5)

    def check_fields(self, *values):
        for v in values:
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"field X = {v!r} must be positive")

    def solve_for(self, unknown, values, ai, aj):
        out = super().solve_for(unknown, values, ai, aj)
        if not out > 0:
            raise SingularDataError(f"solution X = {out:.6g} leaves the positive half-line")
        return out

    def quad_residual(self, x, xi, xij, xj, ai, aj):
        A, B = math.exp(2 * ai), math.exp(2 * aj)
        si, sj = math.sinh(2 * ai), math.sinh(2 * aj)
        return sj * B * (A * x - xi) * (A * xij - xj) - si * A * (xi - B * xij) * (xj - B * x)

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha):
        A, B, C = (math.exp(2 * a) for a in alpha)
        return [
            (B * xij - xi) * (C * xjk - xj) * (A * xik - xk),
            -(A * xij - xj) * (B * xjk - xk) * (C * xik - xi),
        ]

    def sample_fields(self, rng, n=4):
        return tuple(math.exp(2 * v) for v in super().sample_fields(rng, n))

    @staticmethod
    def to_field(x):
        return math.exp(2 * x)

    @staticmethod
    def from_field(X):
        if not X > 0:
            raise DomainError("X must be positive")
        return 0.5 * math.log(X)


class H1(QuadModel):
    name = "h1"

    def quad_residual(self, x, xi, xij, xj, ai, aj):
        return (x - xij) * (xi - xj) - (ai - aj)

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha):
        return [xij * (xi - xj), xjk * (xj - xk), xik * (xk - xi)]


class H2(QuadModel):
    name = "h2"

    def quad_residual(self, x, xi, xij, xj, ai, aj):
        return (x - xij) * (xi - xj) + (aj - ai) * (x + xi + xj + xij) + aj * aj - ai * ai

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha):
        ai, aj, ak = alpha
        return [
            xij * (xi - xj + ai - aj),
            xjk * (xj - xk + aj - ak),
            xik * (xk - xi + ak - ai),
            xi * (ak - aj),
            xj * (ai - ak),
            xk * (aj - ai),
        ]


class H3(QuadModel):
    name = "h3"

    def __init__(self, delta: float = 0.0):
        self.delta = float(delta)

    @property
    def params(self):
        return {"delta": self.delta}

    def quad_residual(self, x, xi, xij, xj, ai, aj):
        return ai * (x * xi + xj * xij) - aj * (x * xj + xi * xij) + self.delta * (ai * ai - aj * aj)

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha):
        ai, aj, ak = alpha
        return [
            ai * xj * xij, -aj * xi * xij,
            aj * xk * xjk, -ak * xj * xjk,
            ak * xi * xik, -ai * xk * xik,
        ]


# -- leg functions ---------------------------------------------------------------------

class LogLegs(Legs):
    """``L = a log|x - y|`` and ``Lam = (a - b) log|x - y|``."""

    @staticmethod
    def _gap(x, y):
        d = x - y
        if d == 0.0:
            raise DomainError("coincident field values in a logarithmic leg")
        return d

    def L(self, x, y, a):
        return a * math.log(abs(self._gap(x, y)))

    def Lam(self, x, y, a, b):
        return (a - b) * math.log(abs(self._gap(x, y)))

    def psi(self, x, y, a):
        return a / self._gap(x, y)

    def phi(self, x, y, a, b):
        return (a - b) / self._gap(x, y)

    def psi_domain(self, a):
        return [(-math.inf, 0.0), (0.0, math.inf)]

    def phi_domain(self, a, b):
        return [(-math.inf, 0.0), (0.0, math.inf)]


class ExpLegs(Legs):
    """``dL/dx = log((a - e^u)/(1 - gamma a e^u))``, ``dLam/dx = log((a - b e^u)/(b - a e^u))``.

    Here ``u = y - x``.  ``L`` is real on ``u < psi_upper(a)``.  ``Lam`` is
    real for ``|u| > |log(a/b)|``; on the upper branch it is fixed by
    ``Lam(x, y; a, b) = -Lam(y, x; b, a)``.
    """

    def __init__(self, gamma: float = 0.0):
        if not gamma >= 0:
            raise DomainError("gamma must be non-negative")
        self.gamma = float(gamma)

    def psi_upper(self, a) -> float:
        ub = math.log(a)
        if self.gamma > 0:
            ub = min(ub, -math.log(self.gamma * a))
        return ub

    def psi_u(self, u, a):
        e = math.exp(u)
        num = a - e
        den = 1.0 - self.gamma * a * e
        if not (num > 0 and den > 0):
            raise DomainError(f"leg argument out of range (u = {u:.6g}, alpha = {a:.6g})")
        return math.log(num / den)

    def phi_u(self, u, a, b):
        if a == b:
            return 0.0
        e = math.exp(u)
        num, den = a - b * e, b - a * e
        if den == 0 or not num / den > 0:
            raise DomainError(f"leg argument out of range (u = {u:.6g}, alpha = {a:.6g}, beta = {b:.6g})")
        return math.log(num / den)

    def psi(self, x, y, a):
        return self.psi_u(y - x, a)

    def phi(self, x, y, a, b):
        return self.phi_u(y - x, a, b)

    def psi_domain(self, a):
        return [(-math.inf, self.psi_upper(a))]

    def phi_domain(self, a, b):
        if a == b:
            return [(-math.inf, math.inf)]
        ell = abs(math.log(a / b))
        return [(-math.inf, -ell), (ell, math.inf)]

    def L(self, x, y, a):
        u = y - x
        ub = self.psi_upper(a)
        if not u < ub:
            raise DomainError(f"L outside its domain (u = {u:.6g})")
        return -antiderivative(lambda t: self.psi_u(t, a), ub - 1.0, u)

    def _lam_lower(self, u, a, b, ell):
        return -antiderivative(lambda t: self.phi_u(t, a, b), -ell - 1.0, u)

    def Lam(self, x, y, a, b):
        if a == b:
            return 0.0
        u = y - x
        ell = abs(math.log(a / b))
        if u < -ell:
            return self._lam_lower(u, a, b, ell)
        if u > ell:
            return self._lam_lower(-u, a, b, ell)
        raise DomainError(f"Lambda outside its domain (u = {u:.6g})")


# -- Lagrangian models -------------------------------------------------------------------

class LagrangianMixin:
    """Shared machinery of models with a three-point 2-form."""

    has_lagrangian = True
    legs: Legs

    def form(self, alpha: Sequence[float]) -> ThreePointForm:
        return ThreePointForm(self.legs, alpha)

    def closed_sign(self, label: str) -> float:
        """Factor turning the generic corner residual into the closed form."""
        raise NotImplementedError

    def corner_residual_closed(self, cf: CubeFields, alpha, label: str) -> float:
        perm, two = _CYCLIC[label]
        c = cf.relabel(perm)
        a = tuple(alpha[p] for p in perm)
        return self._closed_two(c, a) if two else self._closed_one(c, a)

    def corner_residuals_closed(self, cf: CubeFields, alpha) -> dict:
        return {label: self.corner_residual_closed(cf, alpha, label) for label in OCTAHEDRON_LABELS}

    def octahedron_value(self, cf: CubeFields, alpha) -> float:
        return self.octahedron_residual(*cf.octahedron(), alpha)

    def solve_octahedron(self, cf: CubeFields, alpha, target: str) -> float:
        """Field value at ``target`` satisfying the octahedron relation.

        The cleared relation is affine in the natural variable of each field.
        """
        base = cf.as_dict()

        def r(t):
            vals = dict(base)
            vals[target] = self.from_natural(t)
            return self.octahedron_cleared(*CubeFields(**vals).octahedron(), alpha)

        r0, r1 = r(self.natural_probe[0]), r(self.natural_probe[1])
        coef = (r1 - r0) / (self.natural_probe[1] - self.natural_probe[0])
        if coef == 0.0:
            raise SingularDataError(f"octahedron relation does not determine {target}")
        t = self.natural_probe[0] - r0 / coef
        return self.from_natural(t)


_CYCLIC = {
    "xi": ((0, 1, 2), False),
    "xj": ((1, 2, 0), False),
    "xk": ((2, 0, 1), False),
    "xij": ((0, 1, 2), True),
    "xjk": ((1, 2, 0), True),
    "xik": ((2, 0, 1), True),
}


class Q1d0Lagrangian(LagrangianMixin, Q1d0):
    """Cross-ratio equation with ``L = a log|x - y|``, ``Lam = (a - b) log|x - y|``."""

    natural_probe = (0.0, 1.0)

    def __init__(self):
        self.legs = LogLegs()

    def from_natural(self, t):
        return t

    def closed_sign(self, label):
        return -1.0

    def _closed_one(self, c, a):
        ai, aj, ak = a
        return (aj / (c.xij - c.xi) - ak / (c.xik - c.xi)
                - (aj - ai) / (c.xj - c.xi) + (ak - ai) / (c.xk - c.xi))

    def _closed_two(self, c, a):
        ai, aj, ak = a
        return -(aj / (c.xij - c.xi) - ai / (c.xij - c.xj)
                 - (aj - ak) / (c.xij - c.xik) + (ai - ak) / (c.xij - c.xjk))

    def octahedron_cleared(self, *args):
        return self.octahedron_residual(*args)

    def sample_octahedron(self, rng, alpha, margin=0.05):
        vals = rng.uniform(-2.0, 2.0, 6)
        d = np.abs(vals[:, None] - vals[None, :]) + np.eye(6) * 10
        if d.min() < margin:
            return None
        return CubeFields.from_octahedron(vals)


class ExpModel(LagrangianMixin, Model):
    """Exponential three-point model; ``gamma > 0`` deforms the ``L`` leg."""

    alpha_box = (1.5, 3.0)
    natural_probe = (1.0, 2.0)

    def __init__(self, gamma: float = 0.0):
        if not (math.isfinite(gamma) and gamma >= 0):
            raise DomainError("gamma must be a non-negative number")
        self.gamma = float(gamma)
        self.legs = ExpLegs(self.gamma)
        self.name = "exp" if self.gamma == 0 else "exp-gamma"

    @property
    def params(self):
        return {"gamma": self.gamma}

    def sample_alpha(self, rng, n=3):
        lo, hi = self.alpha_box
        if self.gamma > 0:
            # keep 1 - gamma a^2 >= 1e-2
            hi = min(hi, math.sqrt(0.99 / self.gamma))
        if hi <= lo:
            raise DomainError(f"gamma = {self.gamma} leaves no admissible alpha in {self.alpha_box}")
        return tuple(float(a) for a in rng.uniform(lo, hi, n))

    def from_natural(self, t):
        if not t > 0:
            raise DomainError(f"X = {t:.6g} is not positive")
        return math.log(t)

    def closed_sign(self, label):
        return 1.0 if len(label) == 2 else -1.0

    @staticmethod
    def _log_ratio(num, den):
        r = num / den if den != 0 else math.nan
        if not r > 0:
            raise DomainError("factor of a corner product is not positive")
        return math.log(r)

    def _closed_one(self, c, a):
        ai, aj, ak = a
        g = self.gamma
        Xi, Xj, Xk, Xij, Xik = (math.exp(v) for v in (c.xi, c.xj, c.xk, c.xij, c.xik))
        lr = self._log_ratio
        return (lr(aj * Xi - Xij, Xi - g * aj * Xij)
                + lr(ai * Xi - aj * Xj, aj * Xi - ai * Xj)
                + lr(Xi - g * ak * Xik, ak * Xi - Xik)
                + lr(ak * Xi - ai * Xk, ai * Xi - ak * Xk))

    def _closed_two(self, c, a):
        ai, aj, ak = a
        g = self.gamma
        Xi, Xj, Xij, Xjk, Xik = (math.exp(v) for v in (c.xi, c.xj, c.xij, c.xjk, c.xik))
        lr = self._log_ratio
        return (lr(aj * Xi - Xij, Xi - g * aj * Xij)
                + lr(aj * Xij - ak * Xik, ak * Xij - aj * Xik)
                + lr(Xj - g * ai * Xij, ai * Xj - Xij)
                + lr(ak * Xij - ai * Xjk, ai * Xij - ak * Xjk))

    def octahedron_terms(self, xi, xj, xk, xij, xjk, xik, alpha):
        ai, aj, ak = alpha
        Xi, Xj, Xk, Xij, Xjk, Xik = (math.exp(v) for v in (xi, xj, xk, xij, xjk, xik))
        return [
            (aj * Xij - ak * Xik) / Xi,
            (ak * Xjk - ai * Xij) / Xj,
            (ai * Xik - aj * Xjk) / Xk,
        ]

    def octahedron_residual(self, xi, xj, xk, xij, xjk, xik, alpha):
        """Undeformed: the three-term sum.  Deformed: ``-log(P) / gamma``.

        ``P`` is the three-factor product that equals 1 on solutions; the
        scaling makes the deformed residual tend to the undeformed one.
        """
        if self.gamma == 0:
            return float(sum(self.octahedron_terms(xi, xj, xk, xij, xjk, xik, alpha)))
        ai, aj, ak = alpha
        g = self.gamma
        args = [
            (-g * aj * math.exp(xij - xi), 1), (-g * ak * math.exp(xjk - xj), 1), (-g * ai * math.exp(xik - xk), 1),
            (-g * ai * math.exp(xij - xj), -1), (-g * aj * math.exp(xjk - xk), -1), (-g * ak * math.exp(xik - xi), -1),
        ]
        logp = 0.0
        for z, s in args:
            if not z > -1:
                raise DomainError("factor of the octahedron product is not positive")
            logp += s * math.log1p(z)
        return -logp / g

    def octahedron_scale(self, xi, xj, xk, xij, xjk, xik, alpha):
        return max(1.0, float(sum(abs(t) for t in self.octahedron_terms(xi, xj, xk, xij, xjk, xik, alpha))))

    def octahedron_cleared(self, xi, xj, xk, xij, xjk, xik, alpha):
        """Polynomial form, affine in each ``X``."""
        ai, aj, ak = alpha
        g = self.gamma
        Xi, Xj, Xk, Xij, Xjk, Xik = (math.exp(v) for v in (xi, xj, xk, xij, xjk, xik))
        if g == 0:
            return ((aj * Xij - ak * Xik) * Xj * Xk + (ak * Xjk - ai * Xij) * Xi * Xk
                    + (ai * Xik - aj * Xjk) * Xi * Xj)
        num = (Xi - g * aj * Xij) * (Xj - g * ak * Xjk) * (Xk - g * ai * Xik)
        den = (Xj - g * ai * Xij) * (Xk - g * aj * Xjk) * (Xi - g * ak * Xik)
        return (den - num) / g

    def sample_octahedron(self, rng, alpha, margin=0.05):
        ai, aj, ak = alpha
        ub = self.legs.psi_upper
        xi, xj, xk = (float(v) for v in rng.uniform(-2.0, 2.0, 3))
        lows = rng.uniform(margin, 2.0, 3)
        xij = min(xi + ub(aj), xj + ub(ai)) - lows[0]
        xjk = min(xj + ub(ak), xk + ub(aj)) - lows[1]
        xik = min(xi + ub(ak), xk + ub(ai)) - lows[2]
        return CubeFields(xi=xi, xj=xj, xk=xk, xij=float(xij), xjk=float(xjk), xik=float(xik))


def toda_residual(center, right, left, up, down, right_down, left_up, alpha_up, beta_right) -> float:
    """Log-form of the relativistic Toda equation of the exponential model.

    Neighbors of ``x_k``: ``right = x_{k+1}``, ``left = x_{k-1}``, ``up`` is
    the tilde shift, ``down`` the under-tilde shift, ``right_down`` the
    under-tilde of ``x_{k+1}`` and ``left_up`` the tilde of ``x_{k-1}``.
    ``beta_right`` belongs to the ``k`` direction, ``alpha_up`` to time.
    Returns ``log(RHS) - log(LHS)``.
    """
    a, b = alpha_up, beta_right
    x = center

    def lr(num, den):
        r = num / den
        if not r > 0:
            raise DomainError("Toda factor is not positive")
        return math.log(r)

    lhs = lr(math.exp(up - x) - a, math.exp(x - down) - a)
    e1 = math.exp(right_down - x)
    e2 = math.exp(x - left_up)
    rhs = (lr(math.exp(right - x) - b, math.exp(x - left) - b)
           + lr(b * e1 - a, a * e1 - b)
           + lr(a * e2 - b, b * e2 - a))
    return rhs - lhs


def three_leg_gamma(X, Xi, Xk, Xik, ai, ak, gamma) -> float:
    """Three-leg product on the square ``(x, x_i, x_ik, x_k)`` minus one."""
    g = gamma
    return (g * (ak * Xi - Xik) / (Xi - g * ak * Xik)
            * (ai * Xi - ak * Xk) / (ak * Xi - ai * Xk)
            * (ai * X - Xi) / (X - g * ai * Xi)) - 1.0


def rescaled_q3(X, Xi, Xk, Xik, ai, ak, gamma) -> float:
    """Multi-affine quad-equation equivalent to :func:`three_leg_gamma`."""
    g = gamma
    return (ak * (1 - g * ai * ai) * (X * Xi + g * Xk * Xik)
            - ai * (1 - g * ak * ak) * (X * Xk + g * Xi * Xik)
            - g * (ak * ak - ai * ai) * (X * Xik + Xi * Xk))


# -- registry ------------------------------------------------------------------------------

QUAD_MODELS = ("q1d0", "q1d1", "q3d0", "h1", "h2", "h3")
LAGRANGIAN_MODELS = ("q1d0", "exp", "exp-gamma")
MODEL_NAMES = ("q1d0", "q1d1", "q3d0", "h1", "h2", "h3", "exp", "exp-gamma")


def get_model(name: str, **params) -> Model:
    """Build a catalog model; ``params`` are model parameters (``delta``, ``gamma``)."""
    params = {k: v for k, v in params.items() if v is not None}
    allowed = {"h3": {"delta"}, "exp": {"gamma"}, "exp-gamma": {"gamma"}}.get(name, set())
    if name not in MODEL_NAMES:
        raise UnknownModelError(f"unknown model {name!r}; choose from {', '.join(MODEL_NAMES)}")
    extra = set(params) - allowed
    if extra:
        raise DomainError(f"model {name} takes no parameter(s) {', '.join(sorted(extra))}")
    if name == "q1d0":
        return Q1d0Lagrangian()
    if name == "q1d1":
        return Q1d1()
    if name == "q3d0":
        return Q3d0()
    if name == "h1":
        return H1()
    if name == "h2":
        return H2()
    if name == "h3":
        return H3(float(params.get("delta", 0.0)))
    if name == "exp":
        return ExpModel(float(params.get("gamma", 0.0)))
    return ExpModel(float(params.get("gamma", 0.1)))
