import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plurilag.errors import InvalidCellError, NotFlippableError, NotInteriorError, SurfaceError
from plurilag.lattice import (
    Corner,
    OrientedCube,
    OrientedSquare,
    QuadSurface,
    box_corner_surface,
    corner_faces,
    corner_surface,
    cube_boundary,
    flip,
    flip_sign,
    flippable_cubes,
    flower,
    lift_flower,
    planar_patch,
    surface_from_dict,
    surface_to_dict,
)


def test_square_vertices_at_origin():
    sq = OrientedSquare((0, 0), (1, 2))
    assert sq.vertices == [(0, 0), (1, 0), (1, 1), (0, 1)]


def test_square_vertices_swapped_dirs():
    sq = OrientedSquare((2, 3, 5), (3, 1))
    assert sq.vertices == [(2, 3, 5), (2, 3, 6), (3, 3, 6), (3, 3, 5)]


def test_square_equal_dirs_rejected():
    with pytest.raises(InvalidCellError):
        OrientedSquare((0, 0), (1, 1))


def test_square_dir_out_of_range():
    with pytest.raises(InvalidCellError):
        OrientedSquare((0, 0), (1, 3))


def test_reverse_is_involution():
    sq = OrientedSquare((1, 2, 3), (2, 3))
    assert sq.reverse().reverse() == sq
    assert sq.reverse().key == sq.key
    assert sq.reverse().sign == -sq.sign


def test_unit_cube_boundary_incidence():
    c = OrientedCube((0, 0, 0), (1, 2, 3))
    faces = cube_boundary(c)
    assert len(faces) == 6
    at_base = [s for f, s in faces if (0, 0, 0) in f.vertices]
    assert at_base == [-1, -1, -1]
    at_top = [s for f, s in faces if (1, 1, 1) in f.vertices]
    assert at_top == [1, 1, 1]


def test_cube_boundary_has_no_boundary():
    # every oriented edge is cancelled by its reverse
    c = OrientedCube((0, 0, 0, 0), (4, 1, 3))
    count = {}
    for f, s in cube_boundary(c):
        sq = f if s > 0 else f.reverse()
        for a, b in sq.edges():
            count[(a, b)] = count.get((a, b), 0) + 1
    for (a, b), n in count.items():
        assert count.get((b, a), 0) == n


def test_corner_faces_at_base():
    c = OrientedCube((0, 0, 0), (1, 2, 3))
    faces = corner_faces(Corner(c, (0, 0, 0)))
    assert {f.key for f in faces} == {
        OrientedSquare((0, 0, 0), (1, 2)).key,
        OrientedSquare((0, 0, 0), (2, 3)).key,
        OrientedSquare((0, 0, 0), (3, 1)).key,
    }


def test_corner_faces_at_shifted_apex():
    c = OrientedCube((0, 0, 0), (1, 2, 3))
    faces = corner_faces(Corner(c, (1, 0, 0)))
    assert {f.key for f in faces} == {
        OrientedSquare((0, 0, 0), (1, 2)).key,
        OrientedSquare((1, 0, 0), (2, 3)).key,
        OrientedSquare((0, 0, 0), (3, 1)).key,
    }


def test_corner_apex_must_be_cube_vertex():
    with pytest.raises(InvalidCellError):
        Corner(OrientedCube((0, 0, 0), (1, 2, 3)), (2, 0, 0))


def test_planar_flower_has_four_petals():
    patch = planar_patch((2, 2))
    petals = flower(patch, (1, 1))
    assert len(petals) == 4
    # consecutive petals share an edge through the center
    for a, b in zip(petals, petals[1:] + petals[:1]):
        assert len(set(a.vertices) & set(b.vertices)) == 2


def test_corner_surface_flower_has_three_petals():
    # the apex of a lone corner is interior once the corner is part of a box surface
    assert len(corner_surface(OrientedCube((0, 0, 0), (1, 2, 3))).squares) == 3
    assert len(flower(box_corner_surface((2, 2, 2)), (0, 0, 0))) == 3


def test_boundary_vertex_not_interior():
    with pytest.raises(NotInteriorError):
        flower(planar_patch((2, 2)), (0, 1))


def test_lift_flower_cancels_vertical_faces():
    patch = planar_patch((2, 2))
    corners = lift_flower(flower(patch, (1, 1)), (1, 1), 3)
    assert len(corners) == 4
    signed = {}
    for c in corners:
        for f in corner_faces(c):
            if 3 in f.dirs:
                signed.setdefault(f.key, []).append(f.dirs)
    assert len(signed) == 4
    for dirs in signed.values():
        assert len(dirs) == 2 and dirs[0] == dirs[1][::-1]


def test_lift_single_petal_rejected():
    patch = planar_patch((2, 2))
    petals = flower(patch, (1, 1))
    with pytest.raises(InvalidCellError):
        lift_flower(petals[:1], (1, 1), 3)


def test_flip_corner_to_opposite_corner():
    c = OrientedCube((0, 0, 0), (1, 2, 3))
    s = QuadSurface(corner_faces(Corner(c, (0, 0, 0), -1)))
    t = flip(s, c)
    assert {f.key for f in t.squares} == {f.key for f, _ in cube_boundary(c) if (1, 1, 1) in f.vertices}


def test_flip_is_involution():
    c = OrientedCube((0, 0, 0), (1, 2, 3))
    s = box_corner_surface((2, 2, 2))
    t = flip(s, c)
    assert flip(t, c) == s
    assert flip_sign(t, c) == -flip_sign(s, c)


def test_planar_patch_not_flippable():
    s = QuadSurface([sq.embed(3) for sq in planar_patch((2, 2)).squares])
    with pytest.raises(NotFlippableError):
        flip(s, OrientedCube((0, 0, 0), (1, 2, 3)))
    assert flippable_cubes(s) == []


def test_box_corner_surface_flippable_cube():
    s = box_corner_surface((3, 3, 3))
    cubes = flippable_cubes(s, (3, 3, 3))
    assert cubes == [OrientedCube((0, 0, 0), (1, 2, 3))]


def test_surface_duplicates_rejected():
    sq = OrientedSquare((0, 0), (1, 2))
    with pytest.raises(SurfaceError):
        QuadSurface([sq, sq.reverse()])


def test_surface_incoherent_orientation_rejected():
    with pytest.raises(SurfaceError):
        QuadSurface([OrientedSquare((0, 0), (1, 2)), OrientedSquare((1, 0), (2, 1))])


def test_surface_disconnected_rejected():
    with pytest.raises(SurfaceError):
        QuadSurface([OrientedSquare((0, 0), (1, 2)), OrientedSquare((5, 5), (1, 2))])


def test_surface_roundtrip_dict():
    s = box_corner_surface((2, 1, 2))
    assert surface_from_dict(surface_to_dict(s)) == s


def test_surface_file_reports_square_index():
    doc = {"m": 2, "squares": [{"base": [0, 0], "dirs": [1, 2]}, {"base": [1, 0], "dirs": [1, 1]}]}
    with pytest.raises((SurfaceError, InvalidCellError), match="square 1"):
        surface_from_dict(doc)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 20), min_size=5, max_size=5))
def test_random_flip_sequences_keep_a_surface(picks):
    s = box_corner_surface((3, 3, 3))
    for p in picks:
        cubes = flippable_cubes(s, (3, 3, 3))
        c = cubes[p % len(cubes)]
        s = flip(s, c)
        assert len(s.squares) == 27


@settings(max_examples=30, deadline=None)
@given(st.permutations([1, 2, 3]), st.tuples(*[st.integers(-3, 3)] * 3))
def test_cube_boundary_vertex_balance(dirs, base):
    # each vertex meets three faces; the signed count is -3 at x, +3 at x_ijk, 1 or -1 elsewhere
    c = OrientedCube(base, tuple(dirs))
    for label, v in c.vertices().items():
        signs = [s for f, s in cube_boundary(c) if v in f.vertices]
        assert len(signs) == 3
        if label == "x":
            assert sum(signs) == -3
        elif label == "xijk":
            assert sum(signs) == 3
        else:
            assert abs(sum(signs)) == 1


def test_all_corner_apexes_give_three_faces():
    c = OrientedCube((0, 0, 0), (1, 2, 3))
    for v in itertools.product((0, 1), repeat=3):
        assert len(corner_faces(Corner(c, v))) == 3
