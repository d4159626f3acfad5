"""Discrete Lagrangian 2-forms and the quantities built from them.

A 2-form assigns a number to every oriented square given the four field
values at its corners, listed in the cyclic order of
:func:`plurilag.lattice.square_vertices`.  From it we assemble actions on
quad-surfaces, the cube action ``S^ijk`` and the corner (Euler-Lagrange)
residuals.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import dataclass, fields as dc_fields, replace
from typing import Callable, Mapping, Sequence

from .errors import DomainError, InvalidCellError, MissingFieldError
from .lattice import (
    CUBE_LABELS,
    LABEL_STEPS,
    OCTAHEDRON_LABELS,
    Corner,
    OrientedCube,
    QuadSurface,
    corner_faces,
    cube_boundary,
    flower,
)

FieldMap = dict

# each octahedron vertex is left out of exactly one corner equation
ANTIPODE = {"xi": "xjk", "xj": "xik", "xk": "xij", "xij": "xk", "xjk": "xi", "xik": "xj"}


# -- fields on a cube -----------------------------------------------------------

@dataclass(frozen=True)
class CubeFields:
    """Field values at the eight vertices of an elementary cube.

    Labels refer to the cube directions ``(i, j, k)``; three-point forms only
    read the six one- and two-index values.
    """

    x: float | None = None
    xi: float | None = None
    xj: float | None = None
    xk: float | None = None
    xij: float | None = None
    xjk: float | None = None
    xik: float | None = None
    xijk: float | None = None

    def get(self, label: str) -> float:
        if label not in LABEL_STEPS:
            raise InvalidCellError(f"unknown cube vertex label {label!r}")
        v = getattr(self, label)
        if v is None:
            raise MissingFieldError(label)
        return v

    def has(self, label: str) -> bool:
        return getattr(self, label) is not None

    def with_values(self, **values) -> "CubeFields":
        return replace(self, **values)

    def octahedron(self) -> tuple:
        return tuple(self.get(label) for label in OCTAHEDRON_LABELS)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dc_fields(self) if getattr(self, f.name) is not None}

    @classmethod
    def from_octahedron(cls, values: Sequence[float]) -> "CubeFields":
        return cls(**dict(zip(OCTAHEDRON_LABELS, (float(v) for v in values))))

    @classmethod
    def from_map(cls, cube: OrientedCube, f: Mapping) -> "CubeFields":
        return cls(**{label: f.get(v) for label, v in cube.vertices().items()})

    def to_map(self, cube: OrientedCube) -> FieldMap:
        return {cube.vertex(label): v for label, v in self.as_dict().items()}

    def relabel(self, perm: Sequence[int]) -> "CubeFields":
        """Fields seen from the cube with directions permuted by ``perm``.

        ``perm[a]`` is the old position of the new a-th direction.
        """
        return CubeFields(**{label: getattr(self, permute_label(label, perm)) for label in CUBE_LABELS})


def permute_label(label: str, perm: Sequence[int]) -> str:
    """Label, in the original cube, of the vertex called ``label`` after permuting."""
    steps = sorted(perm[s] for s in LABEL_STEPS[label])
    for name, st in LABEL_STEPS.items():
        if list(st) == steps:
            return name
    raise AssertionError(steps)


# -- 2-forms ----------------------------------------------------------------------

class TwoForm:
    """Base class: subclasses provide ``value`` and ``grad``.

    ``alpha`` holds one parameter per lattice direction (direction d uses
    ``alpha[d - 1]``).
    """

    alpha: tuple = ()
    three_point = False

    def param(self, d: int) -> float:
        try:
            return self.alpha[d - 1]
        except IndexError:
            raise InvalidCellError(f"no parameter for direction {d}") from None

    def value(self, dirs, x, xi, xij, xj) -> float:
        raise NotImplementedError

    def grad(self, dirs, x, xi, xij, xj) -> tuple:
        raise NotImplementedError


class ZeroForm(TwoForm):
    def __init__(self, alpha=()):
        self.alpha = tuple(alpha)

    def value(self, dirs, x, xi, xij, xj):
        return 0.0

    def grad(self, dirs, x, xi, xij, xj):
        return (0.0, 0.0, 0.0, 0.0)


class FunctionForm(TwoForm):
    """A 2-form from user callables ``value_fn(dirs, x, xi, xij, xj)``.

    Without ``grad_fn`` the gradient is taken by central differences.
    """

    def __init__(self, value_fn: Callable, grad_fn: Callable | None = None, alpha=(), step=1e-6):
        self.value_fn = value_fn
        self.grad_fn = grad_fn
        self.alpha = tuple(alpha)
        self.step = step

    def value(self, dirs, x, xi, xij, xj):
        return float(self.value_fn(dirs, x, xi, xij, xj))

    def grad(self, dirs, x, xi, xij, xj):
        if self.grad_fn is not None:
            return tuple(self.grad_fn(dirs, x, xi, xij, xj))
        pts = [x, xi, xij, xj]
        out = []
        for a in range(4):
            hi = list(pts)
            lo = list(pts)
            hi[a] += self.step
            lo[a] -= self.step
            out.append((self.value(dirs, *hi) - self.value(dirs, *lo)) / (2 * self.step))
        return tuple(out)


class Legs:
    """Leg functions of a three-point form.

    ``L`` and ``Lam`` are the two Lagrangians, ``psi = dL/dx`` and
    ``phi = dLam/dx``; all are translation invariant, so ``dL/dy = -psi``.
    Domains are lists of open intervals for ``u = y - x``.
    """

    def L(self, x, y, a):
        raise NotImplementedError

    def Lam(self, x, y, a, b):
        raise NotImplementedError

    def psi(self, x, y, a):
        raise NotImplementedError

    def phi(self, x, y, a, b):
        raise NotImplementedError

    def psi_domain(self, a) -> list:
        return [(-math.inf, math.inf)]

    def phi_domain(self, a, b) -> list:
        return [(-math.inf, math.inf)]

    def surrogate_base(self, values: Sequence[float], alphas: Sequence[float]) -> float:
        """A base value ``x`` keeping every leg ``(x, x_a)`` inside its domain."""
        # x_a - x must lie in the first domain interval for every a
        lo, hi = -math.inf, math.inf
        for v, a in zip(values, alphas):
            dlo, dhi = self.psi_domain(a)[0]
            lo, hi = max(lo, v - dhi), min(hi, v - dlo)
        if lo >= hi:
            raise DomainError("no base value keeps all legs admissible")
        if math.isfinite(lo) and math.isfinite(hi):
            return 0.5 * (lo + hi)
        if math.isfinite(lo):
            return lo + 1.0
        if math.isfinite(hi):
            return hi - 1.0
        return 0.0


class ThreePointForm(TwoForm):
    """``L(x, x_i; a_i) - L(x, x_j; a_j) - Lam(x_i, x_j; a_i, a_j)``."""

    three_point = True

    def __init__(self, legs: Legs, alpha: Sequence[float]):
        self.legs = legs
        self.alpha = tuple(float(a) for a in alpha)

    def value(self, dirs, x, xi, xij, xj):
        i, j = dirs
        ai, aj = self.param(i), self.param(j)
        lg = self.legs
        return lg.L(x, xi, ai) - lg.L(x, xj, aj) - lg.Lam(xi, xj, ai, aj)

    def grad(self, dirs, x, xi, xij, xj):
        i, j = dirs
        ai, aj = self.param(i), self.param(j)
        lg = self.legs
        pi = lg.psi(x, xi, ai)
        pj = lg.psi(x, xj, aj)
        f = lg.phi(xi, xj, ai, aj)
        return (pi - pj, -pi - f, 0.0, pj + f)

    def __repr__(self):
        return f"ThreePointForm({type(self.legs).__name__}, alpha={self.alpha})"


# -- actions ----------------------------------------------------------------------

def _lookup(f: Mapping, v):
    try:
        return f[v]
    except KeyError:
        raise MissingFieldError(v) from None


def action(surface: QuadSurface, f: Mapping, form: TwoForm) -> float:
    """Sum of the form over the oriented squares of the surface."""
    total = 0.0
    for sq in surface.squares:
        total += form.value(sq.dirs, *(_lookup(f, v) for v in sq.vertices))
    return total


def el_residual(surface: QuadSurface, f: Mapping, form: TwoForm, n, petals=None) -> float:
    """Derivative of the action with respect to the field at interior vertex ``n``.

    ``petals`` may carry a precomputed ``flower(surface, n)`` for repeated evaluation.
    """
    n = tuple(n)
    total = 0.0
    for sq in petals if petals is not None else flower(surface, n):
        verts = sq.vertices
        g = form.grad(sq.dirs, *(_lookup(f, v) for v in verts))
        total += g[verts.index(n)]
    return total


def corner_el_residual(corner: Corner, f: Mapping, form: TwoForm) -> float:
    """Derivative at the apex of the form summed over the (oriented) corner faces."""
    total = 0.0
    for sq in corner_faces(corner):
        verts = sq.vertices
        g = form.grad(sq.dirs, *(_lookup(f, v) for v in verts))
        total += g[verts.index(corner.apex)]
    return total


_UNIT = OrientedCube((0, 0, 0), (1, 2, 3))
_UNIT_LABEL = {v: label for label, v in _UNIT.vertices().items()}


def _check_dirs(dirs):
    dirs = tuple(dirs)
    if len(dirs) != 3 or len(set(dirs)) != 3:
        raise InvalidCellError(f"cube needs three distinct directions, got {dirs!r}")
    return dirs


def _completed(cf: CubeFields, dirs, form: TwoForm) -> CubeFields:
    """Fill in ``x`` and ``x_ijk`` for three-point forms, which never use them."""
    if not form.three_point:
        for label in CUBE_LABELS:
            cf.get(label)
        return cf
    one = [cf.get(label) for label in ("xi", "xj", "xk")]
    for label in ("xij", "xjk", "xik"):
        cf.get(label)
    x = cf.x
    if x is None:
        x = form.legs.surrogate_base(one, [form.param(d) for d in dirs])
    return cf.with_values(x=x, xijk=cf.xijk if cf.xijk is not None else math.nan)


def cube_action_faces(cf: CubeFields, dirs, form: TwoForm) -> float:
    """Signed sum of the form over the six faces of the cube."""
    dirs = _check_dirs(dirs)
    cf = _completed(cf, dirs, form)
    total = 0.0
    for face, sign in cube_boundary(_UNIT):
        vals = [cf.get(_UNIT_LABEL[v]) for v in face.vertices]
        fd = (dirs[face.dirs[0] - 1], dirs[face.dirs[1] - 1])
        total += sign * form.value(fd, *vals)
    return total


def cube_action_expanded(cf: CubeFields, dirs, form: ThreePointForm) -> float:
    """The twelve-term form of ``S^ijk`` for a three-point form."""
    dirs = _check_dirs(dirs)
    ai, aj, ak = (form.param(d) for d in dirs)
    xi, xj, xk, xij, xjk, xik = cf.octahedron()
    L, Lam = form.legs.L, form.legs.Lam
    return (
        L(xi, xij, aj) + L(xj, xjk, ak) + L(xk, xik, ai)
        - L(xi, xik, ak) - L(xj, xij, ai) - L(xk, xjk, aj)
        - Lam(xij, xik, aj, ak) - Lam(xjk, xij, ak, ai) - Lam(xik, xjk, ai, aj)
        + Lam(xj, xk, aj, ak) + Lam(xk, xi, ak, ai) + Lam(xi, xj, ai, aj)
    )


def cube_action(cf: CubeFields, dirs, form: TwoForm) -> float:
    """``S^ijk``: the discrete exterior derivative of the form on one cube.

    For three-point forms without a value at ``x`` the twelve-term expansion
    is used; otherwise the six faces are summed.
    """
    if form.three_point and cf.x is None:
        return cube_action_expanded(cf, dirs, form)
    return cube_action_faces(cf, dirs, form)


def _face_table():
    table = {label: [] for label in CUBE_LABELS}
    for face, sign in cube_boundary(_UNIT):
        verts = face.vertices
        labels = tuple(_UNIT_LABEL[v] for v in verts)
        for pos, label in enumerate(labels):
            table[label].append((sign, face.dirs, labels, pos))
    return table


# faces through each cube vertex: (sign, local directions, corner labels, position)
_FACES_AT = _face_table()


def corner_residual(cf: CubeFields, dirs, form: TwoForm, label: str) -> float:
    """``dS^ijk / dx_label`` assembled from face gradients."""
    if label not in LABEL_STEPS:
        raise InvalidCellError(f"unknown cube vertex label {label!r}")
    dirs = _check_dirs(dirs)
    if form.three_point and label in ("x", "xijk"):
        return 0.0
    return _corner_sum(_completed(cf, dirs, form), dirs, form, label)


def _corner_sum(cf, dirs, form, label):
    total = 0.0
    for sign, (p, q), labels, pos in _FACES_AT[label]:
        vals = [getattr(cf, name) for name in labels]
        total += sign * form.grad((dirs[p - 1], dirs[q - 1]), *vals)[pos]
    return total


def corner_residuals(cf: CubeFields, dirs, form: TwoForm, labels=OCTAHEDRON_LABELS) -> dict:
    dirs = _check_dirs(dirs)
    for label in labels:
        if label not in LABEL_STEPS:
            raise InvalidCellError(f"unknown cube vertex label {label!r}")
    full = _completed(cf, dirs, form)
    return {label: 0.0 if form.three_point and label in ("x", "xijk") else _corner_sum(full, dirs, form, label)
            for label in labels}


# -- four-leg description of the corner equations --------------------------------

# legs of the corner equations at x_i and x_ij as
# (leaf, kind, center first, parameter positions, coefficient)
_ONE_INDEX_LEGS = (
    ("xij", "psi", True, (1,), 1.0),
    ("xik", "psi", True, (2,), -1.0),
    ("xk", "phi", True, (0, 2), -1.0),
    ("xj", "phi", True, (0, 1), 1.0),
)
_TWO_INDEX_LEGS = (
    ("xi", "psi", False, (1,), -1.0),
    ("xj", "psi", False, (0,), 1.0),
    ("xik", "phi", True, (1, 2), -1.0),
    ("xjk", "phi", True, (0, 2), 1.0),
)
# cyclic relabeling bringing each octahedron vertex to x_i or x_ij
_CYCLE = {
    "xi": ((0, 1, 2), _ONE_INDEX_LEGS),
    "xj": ((1, 2, 0), _ONE_INDEX_LEGS),
    "xk": ((2, 0, 1), _ONE_INDEX_LEGS),
    "xij": ((0, 1, 2), _TWO_INDEX_LEGS),
    "xjk": ((1, 2, 0), _TWO_INDEX_LEGS),
    "xik": ((2, 0, 1), _TWO_INDEX_LEGS),
}


@dataclass(frozen=True)
class Leg:
    leaf: str
    kind: str
    center_first: bool
    params: tuple
    coeff: float


@lru_cache(maxsize=None)
def corner_legs(label: str) -> tuple:
    """The four legs of the corner equation at ``label``.

    Leaf labels refer to the original cube; ``params`` are positions 0, 1, 2
    into the cube directions.
    """
    try:
        perm, table = _CYCLE[label]
    except KeyError:
        raise InvalidCellError(f"no four-leg equation at label {label!r}") from None
    return tuple(
        Leg(permute_label(leaf, perm), kind, first, tuple(perm[p] for p in params), c)
        for leaf, kind, first, params, c in table
    )


def leg_value(legs: Legs, leg: Leg, center: float, leaf: float, alphas) -> float:
    a = [alphas[p] for p in leg.params]
    x, y = (center, leaf) if leg.center_first else (leaf, center)
    return legs.psi(x, y, *a) if leg.kind == "psi" else legs.phi(x, y, *a)


def leg_domain(legs: Legs, leg: Leg, center: float, alphas) -> list:
    """Open intervals of leaf values keeping the leg real."""
    a = [alphas[p] for p in leg.params]
    dom = legs.psi_domain(*a) if leg.kind == "psi" else legs.phi_domain(*a)
    if leg.center_first:
        return [(center + lo, center + hi) for lo, hi in dom]
    return [(center - hi, center - lo) for lo, hi in dom]


def four_leg_residual(cf: CubeFields, dirs, form: ThreePointForm, label: str) -> float:
    """Corner residual written directly as a sum of four legs."""
    dirs = _check_dirs(dirs)
    if label in ("x", "xijk"):
        return 0.0
    alphas = [form.param(d) for d in dirs]
    center = cf.get(label)
    total = 0.0
    for leg in corner_legs(label):
        total += leg.coeff * leg_value(form.legs, leg, center, cf.get(leg.leaf), alphas)
    return total


def equation_labels(label: str) -> set:
    """Fields entering the corner equation at ``label`` (three-point forms)."""
    return {label} | {leg.leaf for leg in corner_legs(label)}


# -- field files ------------------------------------------------------------------

def fields_from_dict(doc) -> FieldMap:
    """Parse ``{"fields": [{"vertex": [...], "value": v}, ...]}``."""
    if not isinstance(doc, Mapping) or "fields" not in doc:
        raise DomainError("field document needs a 'fields' list")
    out = {}
    for idx, item in enumerate(doc["fields"]):
        try:
            out[tuple(int(c) for c in item["vertex"])] = float(item["value"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"field entry {idx}: malformed ({exc})") from None
    return out


def fields_to_dict(f: Mapping) -> dict:
    return {"fields": [{"vertex": list(v), "value": float(x)} for v, x in sorted(f.items())]}


def leg_margin(cf: CubeFields, dirs, form: ThreePointForm) -> float:
    """Smallest distance of any leg argument to the edge of its domain.

    Negative (``-inf``) when some leg of the six corner equations is outside
    its domain.
    """
    dirs = _check_dirs(dirs)
    alphas = [form.param(d) for d in dirs]
    values = cf.as_dict()
    domains = {}
    margin = math.inf
    for label in OCTAHEDRON_LABELS:
        center = values[label]
        for leg in corner_legs(label):
            key = (leg.kind, leg.params)
            if key not in domains:
                a = [alphas[p] for p in leg.params]
                domains[key] = form.legs.psi_domain(*a) if leg.kind == "psi" else form.legs.phi_domain(*a)
            # distances are the same in u = y - x as in the leaf value
            leaf = values[leg.leaf]
            u = leaf - center if leg.center_first else center - leaf
            best = -math.inf
            for lo, hi in domains[key]:
                if lo < u < hi:
                    best = max(best, min(u - lo, hi - u))
            if best < margin:
                margin = best
                if margin == -math.inf:
                    return margin
    return margin
