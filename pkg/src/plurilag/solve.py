"""Numerical kernels: scalar roots, cube completion, quad propagation, rank, quadrature."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import (
    ConvergenceError,
    DomainError,
    InconsistentSystemError,
    InvalidCellError,
    NoAdmissibleRootError,
    NoBracketError,
    SingularDataError,
)
from .forms import (
    ANTIPODE,
    CubeFields,
    ThreePointForm,
    TwoForm,
    corner_legs,
    corner_residual,
    corner_residuals,
    four_leg_residual,
    equation_labels,
    leg_domain,
    leg_value,
)
from .lattice import OCTAHEDRON_LABELS

_EVAL_ERRORS = (DomainError, ZeroDivisionError, ValueError, OverflowError)


@dataclass(frozen=True)
class RootConfig:
    atol: float = 1e-12
    max_iter: int = 80
    expand_factor: float = 1.6
    max_expand: int = 60

    def __post_init__(self):
        if not self.atol > 0:
            raise ValueError("root tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


DEFAULT_ROOT = RootConfig()


def _at_resolution(a, b):
    return abs(b - a) <= 4 * np.finfo(float).eps * max(abs(a), abs(b), 1e-300)


def root_1d(f: Callable[[float], float], a: float, b: float | None = None,
            config: RootConfig = DEFAULT_ROOT) -> float:
    """Root of a scalar function.

    With a bracket ``[a, b]`` that lacks a sign change, or with a single seed
    ``a``, the bracket is widened geometrically about its midpoint until the
    sign changes or ``config.max_expand`` widenings have been tried.
    """
    if b is None:
        a, b = a - 0.5, a + 0.5
    if a > b:
        a, b = b, a
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    tries = 0
    while fa * fb > 0:
        if tries >= config.max_expand:
            raise NoBracketError(f"no sign change found around [{a:g}, {b:g}]")
        mid, half = 0.5 * (a + b), 0.5 * (b - a) * config.expand_factor
        a, b = mid - half, mid + half
        fa, fb = f(a), f(b)
        tries += 1
    try:
        r, info = optimize.brentq(f, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                  maxiter=config.max_iter, full_output=True, disp=False)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from None
    if not info.converged:
        raise ConvergenceError(f"root iteration stopped after {info.iterations} steps")
    fr = f(r)
    if abs(fr) >= config.atol:
        # accept roots pinned down to floating resolution (steep residuals)
        step = 4 * np.finfo(float).eps * max(abs(r), 1.0)
        lo, hi = f(r - step), f(r + step)
        if not (lo * hi <= 0 and abs(fr) <= max(abs(lo), abs(hi))):
            raise ConvergenceError(f"residual {fr:.3e} above tolerance at root {r!r}")
    return r


_FAR_COARSE = np.geomspace(1e-12, 80.0, 7)
_FAR_DENSE = np.geomspace(1e-12, 80.0, 28)
_ENDS = np.geomspace(1e-12, 1e-1, 9)
_INNER = np.linspace(0, 1, 10)[1:-1]
_OFFSETS = np.geomspace(1e-3, 80.0, 16)


def _scan_points(lo, hi, center, monotone=False):
    if monotone:
        # one sign change at most: interval ends plus a coarse sweep of infinite sides
        far = _FAR_COARSE
        if math.isfinite(lo) and math.isfinite(hi):
            w = hi - lo
            pts = [lo + w * 1e-12, lo + w / 2, hi - w * 1e-12]
        elif math.isfinite(lo):
            pts = list(lo + far)
        elif math.isfinite(hi):
            pts = list(hi - far)
        else:
            pts = [center] + list(center + far[1:]) + list(center - far[1:])
        return sorted(p for p in pts if lo < p < hi)
    if math.isfinite(lo) and math.isfinite(hi):
        w = hi - lo
        pts = list(lo + w * _INNER) + list(lo + w * _ENDS) + list(hi - w * _ENDS)
    elif math.isfinite(lo):
        pts = list(lo + _FAR_DENSE)
    elif math.isfinite(hi):
        pts = list(hi - _FAR_DENSE)
    else:
        pts = [center] + list(center + _OFFSETS) + list(center - _OFFSETS)
    return sorted(p for p in pts if lo < p < hi)


def find_roots(f: Callable[[float], float], intervals: Sequence[tuple], center: float = 0.0,
               config: RootConfig = DEFAULT_ROOT, monotone: bool = False) -> list:
    """All roots found by scanning each open interval for sign changes.

    Points where ``f`` is undefined are skipped; sign changes across poles
    are discarded after refinement.  ``monotone`` declares ``f`` monotone on
    each interval, which allows a much coarser scan.
    """
    roots = []
    for lo, hi in intervals:
        samples = []
        for p in _scan_points(lo, hi, center, monotone):
            try:
                v = f(p)
            except _EVAL_ERRORS:
                continue
            if math.isfinite(v):
                samples.append((p, v))
        for (p0, v0), (p1, v1) in zip(samples, samples[1:]):
            if v0 == 0.0:
                roots.append(p0)
                continue
            if v0 * v1 < 0:
                try:
                    r = root_1d(f, p0, p1, config)
                except (ConvergenceError, NoBracketError, *_EVAL_ERRORS):
                    continue
                if abs(f(r)) <= 1e-6 * (1.0 + min(abs(v0), abs(v1))):
                    roots.append(r)
        if samples and samples[-1][1] == 0.0:
            roots.append(samples[-1][0])
    return sorted(set(roots))


def intersect_intervals(a: Sequence[tuple], b: Sequence[tuple]) -> list:
    out = []
    for lo1, hi1 in a:
        for lo2, hi2 in b:
            lo, hi = max(lo1, lo2), min(hi1, hi2)
            if lo < hi:
                out.append((lo, hi))
    return sorted(out)


# -- cube completion ----------------------------------------------------------------

@dataclass
class CubeSolution:
    fields: CubeFields
    dirs: tuple
    alpha: tuple
    residuals: dict
    steps: list = field(default_factory=list)
    root_counts: dict = field(default_factory=dict)
    model: str = ""

    @property
    def max_residual(self) -> float:
        return max(abs(v) for v in self.residuals.values())


def solve_order(given: Sequence[str], targets: Sequence[str]) -> list:
    """Pairs ``(equation label, unknown)`` solving for the targets one at a time.

    Each step uses an equation containing exactly one unknown, preferring
    equations where the unknown is a leaf rather than the center.
    """
    unknown = set(targets)
    steps = []
    while unknown:
        best = None
        for eq in OCTAHEDRON_LABELS:
            hit = equation_labels(eq) & unknown
            if len(hit) != 1:
                continue
            (t,) = hit
            rank = 0 if t != eq else 1
            if best is None or rank < best[0]:
                best = (rank, eq, t)
        if best is None:
            raise InvalidCellError(f"targets {sorted(unknown)} cannot be solved one at a time")
        steps.append((best[1], best[2]))
        unknown.discard(best[2])
    return steps


def unknown_intervals(form: ThreePointForm, values: Mapping, eq: str, target: str, alphas) -> list:
    """Admissible values of ``target`` for the legs of equation ``eq``."""
    legs = corner_legs(eq)
    if target == eq:
        ivs = [(-math.inf, math.inf)]
        for leg in legs:
            leaf = values[leg.leaf]
            # leaf in center + I  <=>  center in leaf - I
            dom = leg_domain(form.legs, leg, 0.0, alphas)
            ivs = intersect_intervals(ivs, [(leaf - hi, leaf - lo) for lo, hi in dom])
        return ivs
    for leg in legs:
        if leg.leaf == target:
            return leg_domain(form.legs, leg, values[eq], alphas)
    raise InvalidCellError(f"{target} does not enter the equation at {eq}")


def _solve_step(form, values, eq, target, dirs, alphas, config):
    legs = corner_legs(eq)
    lf = form.legs

    if target == eq:
        def resid(t):
            return sum(leg.coeff * leg_value(lf, leg, t, values[leg.leaf], alphas) for leg in legs)
    else:
        # only the leg ending at the unknown varies
        c = values[eq]
        (moving,) = [leg for leg in legs if leg.leaf == target]
        rest = sum(leg.coeff * leg_value(lf, leg, c, values[leg.leaf], alphas)
                   for leg in legs if leg is not moving)

        def resid(t):
            return rest + moving.coeff * leg_value(lf, moving, c, t, alphas)

    ivs = unknown_intervals(form, values, eq, target, alphas)
    known = [values[label] for label in OCTAHEDRON_LABELS
             if label in values and label not in (target, ANTIPODE[target])]
    center = float(np.mean(known)) if known else 0.0
    roots = find_roots(resid, ivs, center, config, monotone=target != eq)
    if not roots:
        raise NoAdmissibleRootError(f"equation at {eq} has no admissible root for {target}")
    return min(roots, key=lambda r: abs(r - center)), len(roots)


def solve_single(form: ThreePointForm, values: Mapping, eq: str, target: str, dirs=(1, 2, 3),
                 config: RootConfig = DEFAULT_ROOT) -> tuple:
    """Solve the corner equation at ``eq`` for ``target``; returns ``(value, root count)``."""
    if target not in equation_labels(eq):
        raise InvalidCellError(f"{target} does not enter the equation at {eq}")
    values = {k: float(v) for k, v in values.items()}
    alphas = [form.param(d) for d in dirs]
    return _solve_step(form, values, eq, target, tuple(dirs), alphas, config)


def complete_cube(form: ThreePointForm, given: Mapping, targets: Sequence[str], dirs=(1, 2, 3),
                  config: RootConfig = DEFAULT_ROOT, tol: float = 1e-9, model: str = "") -> CubeSolution:
    """Solve two corner equations for the two missing octahedron fields.

    All six corner residuals are then re-evaluated from face gradients; any
    above ``tol`` raise :class:`InconsistentSystemError`.
    """
    given = {k: float(v) for k, v in given.items()}
    targets = tuple(targets)
    labels = set(given) | set(targets)
    if len(given) != 4 or len(targets) != 2 or labels != set(OCTAHEDRON_LABELS):
        raise InvalidCellError("need four given and two target octahedron labels")
    dirs = tuple(dirs)
    alphas = [form.param(d) for d in dirs]
    values = dict(given)
    steps = solve_order(list(given), targets)
    counts = {}
    for eq, t in steps:
        values[t], counts[t] = _solve_step(form, values, eq, t, dirs, alphas, config)
    cf = CubeFields(**values)
    try:
        res = corner_residuals(cf, dirs, form)
    except _EVAL_ERRORS as exc:
        raise NoAdmissibleRootError(f"completed cube leaves the admissible domain: {exc}") from None
    worst = max(abs(v) for v in res.values())
    if not worst < tol:
        raise InconsistentSystemError(f"corner residual {worst:.3e} exceeds {tol:g}", res)
    return CubeSolution(cf, dirs, tuple(alphas), res, steps, counts, model)


# -- Jacobians and rank ---------------------------------------------------------------

def jacobian_fd(fn: Callable[[np.ndarray], np.ndarray], x0: Sequence[float], step: float = 1e-6) -> np.ndarray:
    x0 = np.asarray(x0, dtype=float)
    cols = []
    for a in range(x0.size):
        e = np.zeros_like(x0)
        e[a] = step
        cols.append((np.asarray(fn(x0 + e)) - np.asarray(fn(x0 - e))) / (2 * step))
    return np.column_stack(cols)


def corner_jacobian(form: TwoForm, cf: CubeFields, dirs=(1, 2, 3), labels=OCTAHEDRON_LABELS,
                    step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the corner residuals in the fields ``labels``.

    Three-point forms are differentiated through their four-leg equations.
    """
    base = [cf.get(label) for label in labels]
    resid = four_leg_residual if getattr(form, "three_point", False) else corner_residual

    def fn(v):
        c = cf.with_values(**dict(zip(labels, (float(t) for t in v))))
        return [resid(c, dirs, form, label) for label in labels]

    return jacobian_fd(fn, base, step)


def numeric_rank(jac, tau: float = 1e-7) -> int:
    """Number of singular values above ``tau`` times the largest one."""
    jac = np.atleast_2d(np.asarray(jac, dtype=float))
    if not np.all(np.isfinite(jac)):
        raise DomainError("matrix has non-finite entries")
    if jac.size == 0:
        return 0
    s = np.linalg.svd(jac, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tau * s[0]))


# -- quadrature ---------------------------------------------------------------------

def antiderivative(g: Callable[[float], float], u0: float, u: float, epsabs: float = 1e-12) -> float:
    """``int_{u0}^{u} g`` by adaptive Gauss-Kronrod quadrature."""
    if u == u0:
        return 0.0
    val, _ = integrate.quad(g, u0, u, epsabs=epsabs, epsrel=1e-12, limit=200)
    if not math.isfinite(val):
        raise DomainError(f"integrand not integrable on [{u0}, {u}]")
    return val


# -- quad-equation propagation -------------------------------------------------------

@dataclass
class QuadCube:
    x: float
    xi: float
    xj: float
    xk: float
    xij: float
    xjk: float
    xik: float
    routes: tuple
    spread: float
    rel_spread: float

    @property
    def xijk(self) -> float:
        return float(np.mean(self.routes))

    def cube_fields(self) -> CubeFields:
        return CubeFields(self.x, self.xi, self.xj, self.xk, self.xij, self.xjk, self.xik, self.routes[0])


def face_solve(model, x, xi, xj, ai, aj) -> float:
    """Fourth corner ``x_ij`` of the square ``(x, x_i, x_ij, x_j)``."""
    return model.solve_for("xij", {"x": x, "xi": xi, "xj": xj}, ai, aj)


def propagate_quad(model, x, xi, xj, xk, alpha) -> QuadCube:
    """Fill one cube from four fields; ``x_ijk`` is computed along three routes."""
    ai, aj, ak = alpha
    xij = face_solve(model, x, xi, xj, ai, aj)
    xjk = face_solve(model, x, xj, xk, aj, ak)
    xik = face_solve(model, x, xi, xk, ai, ak)
    routes = (
        face_solve(model, xi, xij, xik, aj, ak),
        face_solve(model, xj, xjk, xij, ak, ai),
        face_solve(model, xk, xik, xjk, ai, aj),
    )
    spread = max(routes) - min(routes)
    return QuadCube(x, xi, xj, xk, xij, xjk, xik, routes, spread,
                    spread / max(1.0, max(abs(r) for r in routes)))


def propagate_box(model, shape: Sequence[int], axes: Mapping, alpha) -> tuple:
    """Fill ``[0, a] x [0, b] x [0, c]`` from data on the three coordinate axes.

    Returns the field map and the largest relative three-route spread.
    """
    shape = tuple(int(s) for s in shape)
    if len(shape) != 3 or min(shape) < 1:
        raise InvalidCellError("box needs three positive extents")
    f = {}
    for v in _box_points(shape):
        nz = [d for d in range(3) if v[d] > 0]
        if len(nz) <= 1:
            try:
                f[v] = float(axes[v])
            except KeyError:
                raise DomainError(f"missing axis value at {v}") from None
    worst = 0.0
    for v in sorted(_box_points(shape), key=sum):
        nz = [d for d in range(3) if v[d] > 0]
        if len(nz) < 2:
            continue
        try:
            if len(nz) == 2:
                p, q = nz
                n = _step(v, p, q)
                f[v] = face_solve(model, f[n], f[_step(v, q)], f[_step(v, p)], alpha[p], alpha[q])
            else:
                ai, aj, ak = alpha
                xi, xj, xk = f[_step(v, 1, 2)], f[_step(v, 0, 2)], f[_step(v, 0, 1)]
                xij, xjk, xik = f[_step(v, 2)], f[_step(v, 0)], f[_step(v, 1)]
                routes = (
                    face_solve(model, xi, xij, xik, aj, ak),
                    face_solve(model, xj, xjk, xij, ak, ai),
                    face_solve(model, xk, xik, xjk, ai, aj),
                )
                f[v] = routes[0]
                spread = max(routes) - min(routes)
                worst = max(worst, spread / max(1.0, max(abs(r) for r in routes)))
        except SingularDataError as exc:
            raise SingularDataError(f"at vertex {v}: {exc}") from None
    return f, worst


def _box_points(shape):
    a, b, c = shape
    return [(p, q, r) for p in range(a + 1) for q in range(b + 1) for r in range(c + 1)]


def _step(v, *dims):
    v = list(v)
    for d in dims:
        v[d] -= 1
    return tuple(v)
