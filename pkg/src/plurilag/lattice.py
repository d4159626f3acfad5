"""Combinatorics of the multi-time lattice Z^m.

Directions are numbered from 1, so ``e_1`` increments the first coordinate.
A vertex is a plain tuple of ints.  Squares, cubes and corners are frozen
dataclasses; every operation returns new objects.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import InvalidCellError, NotFlippableError, NotInteriorError, SurfaceError

MultiIndex = tuple

# vertex labels of an elementary cube with directions (i, j, k) and the
# positions (0 = i, 1 = j, 2 = k) of the unit steps leading to them
CUBE_LABELS = ("x", "xi", "xj", "xk", "xij", "xjk", "xik", "xijk")
LABEL_STEPS = {
    "x": (),
    "xi": (0,),
    "xj": (1,),
    "xk": (2,),
    "xij": (0, 1),
    "xjk": (1, 2),
    "xik": (0, 2),
    "xijk": (0, 1, 2),
}
OCTAHEDRON_LABELS = ("xi", "xj", "xk", "xij", "xjk", "xik")


def shift(n: Sequence[int], *dirs: int) -> MultiIndex:
    """Return ``n + e_d1 + e_d2 + ...`` (directions 1-based)."""
    out = list(n)
    for d in dirs:
        out[d - 1] += 1
    return tuple(out)


def _check_dirs(base, dirs, count):
    if len(dirs) != count:
        raise InvalidCellError(f"expected {count} directions, got {dirs!r}")
    if len(set(dirs)) != count:
        raise InvalidCellError(f"direction indices must be distinct, got {dirs!r}")
    m = len(base)
    for d in dirs:
        if not isinstance(d, int) or not 1 <= d <= m:
            raise InvalidCellError(f"direction {d!r} outside 1..{m}")


@dataclass(frozen=True)
class OrientedSquare:
    """Elementary square ``(n, n+e_i, n+e_i+e_j, n+e_j)``."""

    base: MultiIndex
    dirs: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(c) for c in self.base))
        object.__setattr__(self, "dirs", tuple(self.dirs))
        if len(self.base) < 2:
            raise InvalidCellError("lattice dimension must be at least 2")
        _check_dirs(self.base, self.dirs, 2)

    @property
    def vertices(self) -> list:
        i, j = self.dirs
        n = self.base
        return [n, shift(n, i), shift(n, i, j), shift(n, j)]

    def reverse(self) -> "OrientedSquare":
        return OrientedSquare(self.base, (self.dirs[1], self.dirs[0]))

    @property
    def key(self):
        """Unoriented identity of the square."""
        return (self.base, frozenset(self.dirs))

    @property
    def sign(self) -> int:
        """+1 when the directions are increasing, -1 otherwise."""
        return 1 if self.dirs[0] < self.dirs[1] else -1

    def edges(self) -> list:
        v = self.vertices
        return [(v[a], v[(a + 1) % 4]) for a in range(4)]

    def embed(self, m: int) -> "OrientedSquare":
        return OrientedSquare(_pad(self.base, m), self.dirs)


def square_vertices(sq: OrientedSquare) -> list:
    return sq.vertices


def oriented(sq: OrientedSquare, sign: int) -> OrientedSquare:
    """Absorb an orientation sign into the square."""
    return sq if sign > 0 else sq.reverse()


@dataclass(frozen=True)
class OrientedCube:
    base: MultiIndex
    dirs: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(c) for c in self.base))
        object.__setattr__(self, "dirs", tuple(self.dirs))
        if len(self.base) < 3:
            raise InvalidCellError("a cube needs lattice dimension at least 3")
        _check_dirs(self.base, self.dirs, 3)

    def vertex(self, label: str) -> MultiIndex:
        try:
            steps = LABEL_STEPS[label]
        except KeyError:
            raise InvalidCellError(f"unknown cube vertex label {label!r}") from None
        return shift(self.base, *(self.dirs[s] for s in steps))

    def vertices(self) -> dict:
        return {label: self.vertex(label) for label in CUBE_LABELS}

    def label_of(self, v: Sequence[int]) -> str:
        v = tuple(v)
        for label in CUBE_LABELS:
            if self.vertex(label) == v:
                return label
        raise InvalidCellError(f"{v} is not a vertex of {self}")


def cube_boundary(c: OrientedCube) -> list:
    """Six ``(square, sign)`` pairs whose signed sum is ``dL(sigma_ijk)``.

    The order follows ``Delta_k L(s_ij) + Delta_i L(s_jk) + Delta_j L(s_ki)``:
    each shifted face with +1 followed by its unshifted partner with -1.
    """
    i, j, k = c.dirs
    n = c.base
    return [
        (OrientedSquare(shift(n, k), (i, j)), +1),
        (OrientedSquare(n, (i, j)), -1),
        (OrientedSquare(shift(n, i), (j, k)), +1),
        (OrientedSquare(n, (j, k)), -1),
        (OrientedSquare(shift(n, j), (k, i)), +1),
        (OrientedSquare(n, (k, i)), -1),
    ]


def relative_orientation(sq: OrientedSquare, c: OrientedCube) -> int:
    """+1 if ``sq`` carries the orientation it has in the boundary of ``c``."""
    for face, sign in cube_boundary(c):
        if face.key == sq.key:
            return 1 if oriented(face, sign).dirs == sq.dirs else -1
    raise InvalidCellError(f"{sq} is not a face of {c}")


@dataclass(frozen=True)
class Corner:
    """Three faces of ``cube`` around ``apex``; ``sign`` flips their orientation."""

    cube: OrientedCube
    apex: MultiIndex
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "apex", tuple(self.apex))
        if self.apex not in self.cube.vertices().values():
            raise InvalidCellError(f"apex {self.apex} is not a vertex of {self.cube}")
        if self.sign not in (1, -1):
            raise InvalidCellError("corner sign must be +1 or -1")

    @property
    def label(self) -> str:
        return self.cube.label_of(self.apex)


def corner_faces(c: Corner) -> list:
    faces = [
        oriented(face, sign * c.sign)
        for face, sign in cube_boundary(c.cube)
        if c.apex in face.vertices
    ]
    assert len(faces) == 3
    return faces


def _pad(n, m):
    n = tuple(n)
    if len(n) > m:
        raise InvalidCellError(f"cannot embed {n} into Z^{m}")
    return n + (0,) * (m - len(n))


class QuadSurface:
    """An oriented disk made of elementary squares.

    Construction validates the surface; failures raise :class:`SurfaceError`
    carrying the index of the offending square when one can be named.
    Equality ignores the order of squares.
    """

    def __init__(self, squares: Iterable[OrientedSquare], validate: bool = True):
        self.squares = tuple(squares)
        if not self.squares:
            raise SurfaceError("surface has no squares")
        self.m = len(self.squares[0].base)
        self._vertex_index = defaultdict(list)
        self._edge_index = defaultdict(list)
        for idx, sq in enumerate(self.squares):
            if len(sq.base) != self.m:
                raise SurfaceError("inconsistent lattice dimension", idx)
            for v in sq.vertices:
                self._vertex_index[v].append(idx)
            for e in sq.edges():
                self._edge_index[frozenset(e)].append((idx, e))
        if validate:
            self._validate()

    # -- validation -------------------------------------------------------
    def _validate(self):
        seen = {}
        for idx, sq in enumerate(self.squares):
            if sq.key in seen:
                raise SurfaceError(f"duplicates square {seen[sq.key]}", idx)
            seen[sq.key] = idx
        for uses in self._edge_index.values():
            if len(uses) > 2:
                raise SurfaceError("edge shared by more than two squares", uses[2][0])
            if len(uses) == 2 and uses[0][1] == uses[1][1]:
                raise SurfaceError("orientation is not coherent", uses[1][0])
        if len(self._components(range(len(self.squares)), None)) != 1:
            raise SurfaceError("surface is not connected")
        for v, idxs in self._vertex_index.items():
            if len(self._components(idxs, v)) != 1:
                raise SurfaceError(f"vertex {v} is pinched", idxs[-1])
        chi = len(self._vertex_index) - len(self._edge_index) + len(self.squares)
        if chi != 1:
            raise SurfaceError(f"Euler characteristic {chi} != 1, not a disk")

    def _components(self, idxs, around):
        # connectivity through shared edges (through edges at `around` if given)
        idxs = list(idxs)
        pool = set(idxs)
        comps = []
        while pool:
            stack = [pool.pop()]
            comp = set(stack)
            while stack:
                a = stack.pop()
                for e in self.squares[a].edges():
                    if around is not None and around not in e:
                        continue
                    for b, _ in self._edge_index[frozenset(e)]:
                        if b in pool:
                            pool.discard(b)
                            comp.add(b)
                            stack.append(b)
            comps.append(comp)
        return comps

    # -- queries ------------------------------------------------------------
    @property
    def vertices(self) -> list:
        return list(self._vertex_index)

    def squares_at(self, v) -> list:
        return [self.squares[i] for i in self._vertex_index.get(tuple(v), ())]

    def is_interior(self, v) -> bool:
        v = tuple(v)
        if v not in self._vertex_index:
            return False
        return all(
            len(uses) == 2 for e, uses in self._edge_index.items() if v in e
        )

    def interior_vertices(self) -> list:
        return [v for v in self._vertex_index if self.is_interior(v)]

    def keys(self) -> set:
        return {sq.key for sq in self.squares}

    def __contains__(self, sq) -> bool:
        return sq in set(self.squares)

    def __len__(self):
        return len(self.squares)

    def __eq__(self, other):
        if not isinstance(other, QuadSurface):
            return NotImplemented
        return set(self.squares) == set(other.squares)

    def __hash__(self):
        return hash(frozenset(self.squares))

    def __repr__(self):
        return f"QuadSurface(m={self.m}, squares={len(self.squares)})"


def flower(surface: QuadSurface, n: Sequence[int]) -> list:
    """Petals around an interior vertex, walked in cyclic order."""
    n = tuple(n)
    if not surface.is_interior(n):
        raise NotInteriorError(f"{n} is not an interior vertex of the surface")
    petals = surface.squares_at(n)
    by_incoming = {}
    for sq in petals:
        for a, b in sq.edges():
            if b == n:
                by_incoming[a] = sq
    out = [petals[0]]
    while True:
        nxt = next(b for a, b in out[-1].edges() if a == n)
        sq = by_incoming[nxt]
        if sq == out[0]:
            return out
        out.append(sq)


def lift_flower(petals: Sequence[OrientedSquare], n: Sequence[int], aux: int) -> list:
    """One oriented 3D-corner per petal, spanned by the petal and ``e_aux``.

    If ``aux`` exceeds the lattice dimension the petals are embedded into
    ``Z^aux`` by appending zero coordinates.
    """
    n = tuple(n)
    if not petals:
        raise InvalidCellError("empty flower")
    outgoing, incoming = [], []
    for sq in petals:
        if n not in sq.vertices:
            raise InvalidCellError(f"petal {sq} does not contain {n}")
        if aux in sq.dirs:
            raise InvalidCellError(f"auxiliary direction {aux} is used by petal {sq}")
        for a, b in sq.edges():
            if a == n:
                outgoing.append(b)
            if b == n:
                incoming.append(a)
    if sorted(outgoing) != sorted(incoming) or len(set(outgoing)) != len(outgoing):
        raise InvalidCellError(f"petals do not close up around {n}")
    m = max(len(n), aux)
    apex = _pad(n, m)
    corners = []
    for sq in petals:
        sq = sq.embed(m)
        cube = OrientedCube(sq.base, (sq.dirs[0], sq.dirs[1], aux))
        corners.append(Corner(cube, apex, relative_orientation(sq, cube)))
    return corners


def flip(surface: QuadSurface, c: OrientedCube) -> QuadSurface:
    """Replace the three faces of ``c`` lying in the surface by the other three."""
    boundary = cube_boundary(c)
    keys = surface.keys()
    own = {sq.key: sq for sq in surface.squares}
    inside = [(face, sign) for face, sign in boundary if face.key in keys]
    if len(inside) != 3:
        raise NotFlippableError(f"surface meets {c} in {len(inside)} faces, need a 3-face corner")
    common = set(inside[0][0].vertices) & set(inside[1][0].vertices) & set(inside[2][0].vertices)
    if len(common) != 1:
        raise NotFlippableError(f"faces of {c} in the surface do not form a corner")
    rel = {oriented(face, sign).dirs == own[face.key].dirs for face, sign in inside}
    if len(rel) != 1:
        raise NotFlippableError("surface orientation is not coherent with the cube")
    s = 1 if rel.pop() else -1
    removed = {face.key for face, _ in inside}
    squares = [sq for sq in surface.squares if sq.key not in removed]
    squares += [oriented(face, -s * sign) for face, sign in boundary if face.key not in keys]
    try:
        return QuadSurface(squares)
    except SurfaceError as exc:
        raise NotFlippableError(f"flip would break the surface: {exc}") from exc


def flip_sign(surface: QuadSurface, c: OrientedCube) -> int:
    """Sign ``s`` with ``action(flip(surface, c)) - action(surface) = -s * S(c)``."""
    own = {sq.key: sq for sq in surface.squares}
    for face, sign in cube_boundary(c):
        if face.key in own:
            return 1 if oriented(face, sign).dirs == own[face.key].dirs else -1
    raise NotFlippableError(f"{c} does not touch the surface")


def flippable_cubes(surface: QuadSurface, bounds: Sequence[int] | None = None) -> list:
    """Cubes adjacent to the surface that :func:`flip` accepts.

    ``bounds`` restricts candidates to cubes inside the box ``[0, bounds]``.
    """
    m = surface.m
    dirs = tuple(range(1, m + 1))
    candidates = set()
    for sq in surface.squares:
        for k in dirs:
            if k in sq.dirs:
                continue
            for base in (sq.base, tuple(c - (d == k) for d, c in enumerate(sq.base, 1))):
                trio = tuple(sorted(set(sq.dirs) | {k}))
                candidates.add(OrientedCube(base, trio))
    out = []
    for c in sorted(candidates, key=lambda c: (c.base, c.dirs)):
        if bounds is not None:
            top = shift(c.base, *c.dirs)
            if min(c.base) < 0 or any(t > b for t, b in zip(top, bounds)):
                continue
        try:
            flip(surface, c)
        except NotFlippableError:
            continue
        out.append(c)
    return out


# -- constructors -------------------------------------------------------------

def planar_patch(shape=(2, 2), base=(0, 0), dirs=(1, 2)) -> QuadSurface:
    """Rectangular patch of ``shape[0] x shape[1]`` squares in the plane ``dirs``."""
    i, j = dirs
    squares = []
    for a in range(shape[0]):
        for b in range(shape[1]):
            n = list(base)
            n[i - 1] += a
            n[j - 1] += b
            squares.append(OrientedSquare(tuple(n), (i, j)))
    return QuadSurface(squares)


def corner_surface(c: OrientedCube, label: str = "x") -> QuadSurface:
    return QuadSurface(corner_faces(Corner(c, c.vertex(label))))


def box_corner_surface(shape: Sequence[int]) -> QuadSurface:
    """The three coordinate faces of ``[0, a] x [0, b] x [0, c]`` through the origin.

    Oriented like the unshifted faces of :func:`cube_boundary`, so the unit
    cube at the origin is flippable.
    """
    a, b, c = shape
    squares = []
    for p in range(a):
        for q in range(b):
            squares.append(OrientedSquare((p, q, 0), (2, 1)))
    for q in range(b):
        for r in range(c):
            squares.append(OrientedSquare((0, q, r), (3, 2)))
    for r in range(c):
        for p in range(a):
            squares.append(OrientedSquare((p, 0, r), (1, 3)))
    return QuadSurface(squares)


# -- file format --------------------------------------------------------------

def surface_from_dict(doc: Mapping) -> QuadSurface:
    """Parse ``{"m": int, "squares": [{"base": [...], "dirs": [i, j]}, ...]}``."""
    if not isinstance(doc, Mapping) or "squares" not in doc:
        raise SurfaceError("surface document needs a 'squares' list")
    m = doc.get("m")
    squares = []
    for idx, item in enumerate(doc["squares"]):
        try:
            sq = OrientedSquare(tuple(item["base"]), tuple(item["dirs"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SurfaceError(f"malformed square ({exc})", idx) from None
        if m is not None and len(sq.base) != m:
            raise SurfaceError(f"base has dimension {len(sq.base)}, expected {m}", idx)
        squares.append(sq)
    return QuadSurface(squares)


def surface_to_dict(surface: QuadSurface) -> dict:
    return {
        "m": surface.m,
        "squares": [{"base": list(sq.base), "dirs": list(sq.dirs)} for sq in surface.squares],
    }


def cube_faces_around(c: OrientedCube) -> list:
    """The eight corners of a cube, one per vertex."""
    return [Corner(c, c.vertex(label)) for label in CUBE_LABELS]


def all_pairs(dirs: Sequence[int]) -> list:
    return list(combinations(dirs, 2))
