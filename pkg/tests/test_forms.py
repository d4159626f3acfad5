import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import spence

from plurilag.errors import DomainError, MissingFieldError
from plurilag.forms import (
    CubeFields,
    FunctionForm,
    Legs,
    ThreePointForm,
    ZeroForm,
    action,
    corner_el_residual,
    corner_residual,
    corner_residuals,
    cube_action,
    cube_action_expanded,
    cube_action_faces,
    el_residual,
    equation_labels,
    fields_from_dict,
    fields_to_dict,
    four_leg_residual,
)
from plurilag.lattice import OCTAHEDRON_LABELS, OrientedCube, box_corner_surface, flower, lift_flower, planar_patch
from plurilag.models import ExpLegs, LogLegs, get_model

SQUARE_FIELDS = {(0, 0): 0.0, (1, 0): 1.0, (1, 1): 3.0, (0, 1): 2.0}
CORNER_EXAMPLE = CubeFields(xi=0.0, xj=1.0, xk=-1.0, xij=2.0, xik=-1.5, xjk=0.37)


class ZeroLegs(Legs):
    def L(self, x, y, a):
        return 0.0

    def Lam(self, x, y, a, b):
        return 0.0

    def psi(self, x, y, a):
        return 0.0

    def phi(self, x, y, a, b):
        return 0.0


def q1_form(alpha=(1.0, 2.0, 3.0)):
    return ThreePointForm(LogLegs(), alpha)


def spread_octahedron(draw_values):
    vals = np.asarray(draw_values, dtype=float)
    gaps = np.abs(vals[:, None] - vals[None, :]) + np.eye(len(vals))
    return gaps.min() > 1e-2


octa = st.lists(st.floats(-3, 3), min_size=6, max_size=6).filter(spread_octahedron)
alphas = st.tuples(*[st.floats(0.5, 4.0)] * 3)


def test_zero_form_action_is_zero():
    assert action(planar_patch((2, 3)), {v: 1.0 + v[0] for v in planar_patch((2, 3)).vertices}, ZeroForm()) == 0.0


def test_single_square_q1_action():
    # 1 log|0 - 1| - 2 log|0 - 2| - (1 - 2) log|1 - 2|
    s = action(planar_patch((1, 1)), SQUARE_FIELDS, ThreePointForm(LogLegs(), (1.0, 2.0)))
    assert s == pytest.approx(-2 * math.log(2), abs=1e-15)


def test_missing_field_names_vertex():
    f = dict(SQUARE_FIELDS)
    del f[(1, 1)]
    with pytest.raises(MissingFieldError, match=r"\(1, 1\)"):
        action(planar_patch((1, 1)), f, ZeroForm((1.0, 2.0)))


def test_el_residual_coincident_fields_domain_error():
    patch = planar_patch((2, 2))
    f = {v: 0.5 for v in patch.vertices}
    with pytest.raises(DomainError):
        el_residual(patch, f, q1_form((1.0, 2.0)), (1, 1))


def test_el_residual_zero_legs():
    patch = planar_patch((2, 2))
    f = {v: float(v[0] + 2 * v[1]) for v in patch.vertices}
    assert el_residual(patch, f, ThreePointForm(ZeroLegs(), (1.0, 2.0)), (1, 1)) == 0.0
    assert el_residual(patch, f, ZeroForm((1.0, 2.0)), (1, 1)) == 0.0


def test_corner_residual_x_is_identically_zero():
    form = q1_form()
    assert corner_residual(CORNER_EXAMPLE, (1, 2, 3), form, "x") == 0.0
    assert corner_residual(CORNER_EXAMPLE, (1, 2, 3), form, "xijk") == 0.0


def test_q1_corner_example_vanishes():
    # closed E_i: 2/2 - 3/(-1.5) - 1/1 + 2/(-1) = 0
    form = q1_form()
    assert corner_residual(CORNER_EXAMPLE, (1, 2, 3), form, "xi") == pytest.approx(0.0, abs=1e-15)
    assert four_leg_residual(CORNER_EXAMPLE, (1, 2, 3), form, "xi") == pytest.approx(0.0, abs=1e-15)


def test_symmetric_data_corner_residual_vanishes():
    # the legs to x_j, x_k and to x_ij, x_ik cancel pairwise
    form = q1_form((1.0, 2.5, 2.5))
    cf = CubeFields(xi=0.1, xj=1.2, xk=1.2, xij=-0.7, xik=-0.7, xjk=2.0)
    assert four_leg_residual(cf, (1, 2, 3), form, "xi") == 0.0


def test_constant_form_cube_action_vanishes():
    form = FunctionForm(lambda dirs, *v: 1.0 if dirs[0] < dirs[1] else -1.0)
    cf = CubeFields(*np.linspace(0.1, 0.8, 8))
    assert cube_action_faces(cf, (1, 2, 3), form) == 0.0
    assert cube_action(cf, (1, 2, 3), ZeroForm((1, 2, 3))) == 0.0


def test_equation_labels_exclude_antipode():
    assert equation_labels("xi") == {"xi", "xj", "xk", "xij", "xik"}
    assert equation_labels("xij") == {"xi", "xj", "xij", "xik", "xjk"}


def test_field_file_roundtrip_and_errors():
    f = {(0, 1, 2): 0.5, (1, 1, 1): -2.0}
    assert fields_from_dict(fields_to_dict(f)) == f
    with pytest.raises(DomainError, match="entry 1"):
        fields_from_dict({"fields": [{"vertex": [0], "value": 1}, {"vertex": [0, 1]}]})


def test_exp_legs_match_dilogarithm():
    # L(u) = F(u) - F(log a - 1), F(u) = -u log a + Li2(e^u / a), Li2(z) = spence(1 - z)
    legs = ExpLegs(0.0)
    a = 2.3
    li2 = lambda z: spence(1.0 - z)

    def F(u):
        return -u * math.log(a) + li2(math.exp(u) / a)

    for u in (-4.0, -1.3, 0.2, 0.8):
        assert legs.L(0.0, u, a) == pytest.approx(F(u) - F(math.log(a) - 1.0), abs=1e-12)


def test_exp_lambda_matches_dilogarithm_on_both_branches():
    legs = ExpLegs(0.0)
    a, b = 2.7, 1.6
    ell = math.log(a / b)
    li2 = lambda z: spence(1.0 - z)

    def G(u):
        return -u * ell + li2(b / a * math.exp(u)) - li2(a / b * math.exp(u))

    for u in (-3.0, -ell - 0.2):
        assert legs.Lam(0.0, u, a, b) == pytest.approx(G(u) - G(-ell - 1.0), abs=1e-12)
    # upper branch through Lam(x, y; a, b) = -Lam(y, x; b, a)
    for u in (ell + 0.3, 2.5):
        assert legs.Lam(0.0, u, a, b) == pytest.approx(-legs.Lam(u, 0.0, b, a), abs=1e-14)


def test_exp_leg_derivatives():
    legs = ExpLegs(0.05)
    h = 1e-5
    a, b = 2.1, 1.7
    for x, y in ((0.3, -0.4), (1.0, 0.1)):
        dl = (legs.L(x + h, y, a) - legs.L(x - h, y, a)) / (2 * h)
        assert dl == pytest.approx(legs.psi(x, y, a), abs=1e-8)
    x, y = 0.5, -0.6
    dlam = (legs.Lam(x + h, y, a, b) - legs.Lam(x - h, y, a, b)) / (2 * h)
    assert dlam == pytest.approx(legs.phi(x, y, a, b), abs=1e-8)


def test_exp_leg_outside_domain():
    with pytest.raises(DomainError):
        ExpLegs(0.0).psi(0.0, 2.0, 1.5)
    with pytest.raises(DomainError):
        ExpLegs(0.0).Lam(0.0, 0.1, 2.0, 1.5)


@settings(max_examples=60, deadline=None)
@given(octa, alphas)
def test_cube_action_routes_agree(vals, alpha):
    form = q1_form(alpha)
    cf = CubeFields.from_octahedron(vals)
    expanded = cube_action_expanded(cf, (1, 2, 3), form)
    # the faces never see x or x_ijk, whatever values we put there
    for x, xijk in ((10.0, -7.0), (-5.5, 4.25)):
        faces = cube_action_faces(cf.with_values(x=x, xijk=xijk), (1, 2, 3), form)
        assert faces == pytest.approx(expanded, abs=1e-11)


@settings(max_examples=60, deadline=None)
@given(octa, alphas)
def test_corner_residual_is_derivative_of_cube_action(vals, alpha):
    form = q1_form(alpha)
    cf = CubeFields.from_octahedron(vals)
    h = 1e-6
    for label in OCTAHEDRON_LABELS:
        v = cf.get(label)
        up = cube_action(cf.with_values(**{label: v + h}), (1, 2, 3), form)
        dn = cube_action(cf.with_values(**{label: v - h}), (1, 2, 3), form)
        scale = 1.0 + abs(corner_residual(cf, (1, 2, 3), form, label))
        assert (up - dn) / (2 * h) == pytest.approx(corner_residual(cf, (1, 2, 3), form, label), abs=1e-4 * scale)


@settings(max_examples=60, deadline=None)
@given(octa, alphas)
def test_four_leg_residual_matches_faces(vals, alpha):
    form = q1_form(alpha)
    cf = CubeFields.from_octahedron(vals)
    res = corner_residuals(cf, (1, 2, 3), form)
    for label in OCTAHEDRON_LABELS:
        assert four_leg_residual(cf, (1, 2, 3), form, label) == pytest.approx(res[label], rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), alphas)
def test_flower_is_sum_of_lifted_corners(seed, alpha):
    vals = np.random.default_rng(seed).uniform(-3, 3, 18)
    patch = planar_patch((2, 2))
    pts = [(p, q, r) for p in range(3) for q in range(3) for r in range(2)]
    f3 = dict(zip(pts, vals))
    f2 = {v[:2]: x for v, x in f3.items() if v[2] == 0}
    form = q1_form(alpha)
    el = el_residual(patch, f2, form, (1, 1))
    parts = [corner_el_residual(c, f3, form) for c in lift_flower(flower(patch, (1, 1)), (1, 1), 3)]
    assert el == pytest.approx(sum(parts), abs=1e-12 * max(1.0, abs(el), *map(abs, parts)))


def test_general_form_corner_residual_uses_all_faces():
    # a form depending on all four corners; the corner residual at x is nonzero in general
    form = FunctionForm(lambda dirs, x, xi, xij, xj: x * xij - xi * xj + 0.1 * dirs[0] * x ** 2)
    cf = CubeFields(*np.linspace(0.3, 1.7, 8))
    assert abs(corner_residual(cf, (1, 2, 3), form, "x")) > 1e-3


def test_box_action_matches_sum_over_squares():
    s = box_corner_surface((1, 1, 1))
    f = {v: 0.1 * (v[0] + 2 * v[1] + 4 * v[2]) for v in OrientedCube((0, 0, 0), (1, 2, 3)).vertices().values()}
    form = get_model("q1d0").form((1.0, 2.0, 3.0))
    assert action(s, f, form) == pytest.approx(sum(action(type(s)([sq]), f, form) for sq in s.squares))
