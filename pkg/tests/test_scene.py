"""Unit tests for the exact chart engine on small hand-built charts."""

from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twistlab._scene import Chart, GeometryError, Hop, Leg, Path, reverse_items
from twistlab.fatgroup import Word


def pt(x, y):
    return (Fr(x), Fr(y))


def rect_loop(x0, y0, x1, y1, ccw=True):
    """Closed axis-aligned rectangle, corners as exact fractions."""
    sw, se, ne, nw = pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)
    points = (sw, se, ne, nw, sw) if ccw else (sw, nw, ne, se, sw)
    return Path((Leg(points),), closed=True)


def square_ring(i, half, ccw=True):
    """Rectangle loop around square ``i`` at the given half-width."""
    h = Fr(half)
    return rect_loop(i - h, -h, i + h, h, ccw=ccw)


def gate_loop(chart, theta):
    """Single L-to-R transit through gate 1, closed below the squares."""
    gp = chart.gates[1]
    xl, xr = gp.xl(Fr(theta)), gp.xr(1 - Fr(theta))
    lane = Fr(-3, 10)
    return Path(
        (
            Leg((pt(xl, lane), (xl, gp.y))),
            Hop(1, 1),
            Leg(((xr, gp.y), pt(xr, lane), pt(xl, lane))),
        ),
        closed=True,
    )


def word_of(letters):
    return Word.from_pairs(tuple((abs(l), 1 if l > 0 else -1) for l in letters))


# -- legs and paths ----------------------------------------------------------


def test_leg_rejects_degenerate_data():
    with pytest.raises(GeometryError):
        Leg((pt(0, 0),))
    with pytest.raises(GeometryError):
        Leg((pt(0, 0), pt(0, 0)))
    with pytest.raises(GeometryError):
        Hop(1, 2)


def test_reversal_round_trip():
    c = Chart(2, gate_square=1, gate_count=1)
    loop = gate_loop(c, Fr(1, 2))
    assert loop.reversed().reversed() == loop
    assert reverse_items((Hop(1, 1),)) == (Hop(1, -1),)


# -- development -------------------------------------------------------------


def test_ccw_ring_develops_to_its_ray_letter():
    c = Chart(2)
    for i in (1, 2):
        ring = square_ring(i, Fr(7, 20))
        c.validate_path(ring)
        assert c.develop(ring) == (i,)


def test_cw_ring_develops_to_inverse_letter():
    c = Chart(2)
    assert c.develop(square_ring(1, Fr(7, 20), ccw=False)) == (-1,)


def test_ring_around_both_squares():
    c = Chart(2)
    big = rect_loop(Fr(3, 10), Fr(-3, 5), Fr(27, 10), Fr(3, 5))
    c.validate_path(big)
    assert c.develop(big) == (1, 2)


def test_development_respects_path_order():
    c = Chart(2)
    zig = Path(
        (
            Leg(
                (
                    c.basepoint,
                    pt(Fr(1, 2), Fr(-7, 20)),
                    pt(Fr(5, 2), Fr(-7, 20)),
                    pt(Fr(5, 2), Fr(-9, 20)),
                    pt(Fr(2, 5), Fr(-9, 20)),
                )
            ),
        ),
        closed=False,
    )
    assert c.develop(zig) == (1, 2, -2, -1)


def test_development_of_reversed_path_is_inverse():
    c = Chart(2, gate_square=1, gate_count=1)
    loop = gate_loop(c, Fr(1, 2))
    dev = c.develop(loop)
    assert c.develop(loop.reversed()) == tuple(-l for l in reversed(dev))


def test_segment_along_ray_raises():
    c = Chart(1)
    bad = Path((Leg((pt(1, -2), pt(1, -1), pt(Fr(3, 2), -1))),), closed=False)
    with pytest.raises(GeometryError):
        c.develop(bad)


# -- winding -----------------------------------------------------------------


def test_winding_of_plain_rings():
    c = Chart(2)
    assert c.winding(square_ring(1, Fr(7, 20))) == 1
    assert c.winding(square_ring(1, Fr(7, 20), ccw=False)) == -1


def test_winding_ray_twist_dependence():
    c = Chart(2)
    ring = square_ring(1, Fr(7, 20))
    assert c.winding(ring, ray_twists={1: 7}) == 8
    assert c.winding(ring.reversed(), ray_twists={1: 7}) == -8
    assert c.winding(ring, ray_twists={2: 5}) == 1


def test_winding_requires_closed_path():
    c = Chart(1)
    arc = Path((Leg((pt(Fr(3, 2), -2), pt(Fr(3, 2), -1))),), closed=False)
    with pytest.raises(GeometryError):
        c.winding(arc)


def test_winding_rejects_direction_reversal():
    c = Chart(1)
    spike = Path(
        (Leg((pt(Fr(3, 2), -2), pt(Fr(8, 5), -2), pt(Fr(3, 2), -2))),),
        closed=True,
    )
    with pytest.raises(GeometryError):
        c.winding(spike)


def test_single_transit_loop_winding_matches_gate_twist():
    # one L-to-R transit; flat turning is a half turn short, the gate
    # correction supplies 1/2 + k
    c = Chart(2, gate_square=1, gate_count=1)
    loop = gate_loop(c, Fr(1, 2))
    c.validate_path(loop)
    assert c.develop(loop) == (3,)
    assert c.winding(loop) == 1
    assert c.winding(loop.reversed()) == -1
    assert c.winding(loop, gate_twists={1: 0}) == 0
    assert c.winding(loop, gate_twists={1: 3}) == 3


def test_transit_and_return_loop_bounds_a_disk():
    # enters L, comes back through R; embedded and null-homotopic, so the
    # winding must be +-1 whatever the trivialization twists are
    c = Chart(2, gate_square=1, gate_count=1)
    gp = c.gates[1]
    lane = Fr(-3, 10)
    th = Fr(1, 2)
    xl_in, xr_out = gp.xl(th), gp.xr(1 - th)
    th2 = Fr(3, 4)
    xr_in, xl_out = gp.xr(th2), gp.xl(1 - th2)
    assert xr_in > xr_out and xl_out < xl_in
    east_variant = Path(
        (
            Leg((pt(xl_in, lane), (xl_in, gp.y))),
            Hop(1, 1),
            Leg(((xr_out, gp.y), pt(xr_out, lane), pt(xr_in, lane), (xr_in, gp.y))),
            Hop(1, -1),
            Leg(((xl_out, gp.y), pt(xl_out, lane), pt(xl_in, lane))),
        ),
        closed=True,
    )
    c.validate_path(east_variant)
    assert c.develop(east_variant) == (3, -3)
    for k in (0, 1, 5):
        assert c.winding(east_variant, gate_twists={1: k}) == 1

    th3 = Fr(1, 4)
    xr_in2, xl_out2 = gp.xr(th3), gp.xl(1 - th3)
    assert xr_in2 < xr_out and xl_out2 > xl_in
    west_variant = Path(
        (
            Leg((pt(xl_in, lane), (xl_in, gp.y))),
            Hop(1, 1),
            Leg(((xr_out, gp.y), pt(xr_out, lane), pt(xr_in2, lane), (xr_in2, gp.y))),
            Hop(1, -1),
            Leg(((xl_out2, gp.y), pt(xl_out2, lane), pt(xl_in, lane))),
        ),
        closed=True,
    )
    c.validate_path(west_variant)
    assert c.develop(west_variant) == (3, -3)
    assert c.winding(west_variant) == -1


# -- validation --------------------------------------------------------------


def test_validate_accepts_gate_loop():
    c = Chart(2, gate_square=1, gate_count=1)
    c.validate_path(gate_loop(c, Fr(1, 2)))


def test_validate_rejects_wrong_exit_point():
    c = Chart(2, gate_square=1, gate_count=1)
    gp = c.gates[1]
    xl = gp.xl(Fr(1, 2))
    xr = gp.xr(Fr(1, 2)) + Fr(1, 200)
    lane = Fr(-3, 10)
    bad = Path(
        (
            Leg((pt(xl, lane), (xl, gp.y))),
            Hop(1, 1),
            Leg(((xr, gp.y), pt(xr, lane), pt(xl, lane))),
        ),
        closed=True,
    )
    with pytest.raises(GeometryError, match="identification"):
        c.validate_path(bad)


def test_validate_rejects_slanted_transit():
    c = Chart(2, gate_square=1, gate_count=1)
    gp = c.gates[1]
    xl, xr = gp.xl(Fr(1, 2)), gp.xr(Fr(1, 2))
    lane = Fr(-3, 10)
    bad = Path(
        (
            Leg((pt(xl - Fr(1, 100), lane), (xl, gp.y))),
            Hop(1, 1),
            Leg(((xr, gp.y), pt(xr, lane), pt(xl - Fr(1, 100), lane))),
        ),
        closed=True,
    )
    with pytest.raises(GeometryError, match="vertical"):
        c.validate_path(bad)


def test_validate_rejects_boundary_parameter_transit():
    c = Chart(2, gate_square=1, gate_count=1)
    gp = c.gates[1]
    xl, xr = gp.left_x0, gp.xr(1)
    lane = Fr(-3, 10)
    bad = Path(
        (
            Leg((pt(xl, lane), (xl, gp.y))),
            Hop(1, 1),
            Leg(((xr, gp.y), pt(xr, lane), pt(xl, lane))),
        ),
        closed=True,
    )
    with pytest.raises(GeometryError, match="boundary parameter"):
        c.validate_path(bad)


def test_validate_rejects_hop_at_path_start():
    c = Chart(2, gate_square=1, gate_count=1)
    gp = c.gates[1]
    xl, xr = gp.xl(Fr(1, 2)), gp.xr(Fr(1, 2))
    lane = Fr(-3, 10)
    bad = Path(
        (
            Hop(1, 1),
            Leg(((xr, gp.y), pt(xr, lane), pt(xl, lane), (xl, gp.y))),
        ),
        closed=True,
    )
    with pytest.raises(GeometryError, match="start and end with a leg"):
        c.validate_path(bad)


def test_validate_rejects_point_inside_square():
    c = Chart(1)
    bad = Path(
        (Leg((pt(Fr(1, 2), -1), pt(1, 0), pt(Fr(3, 2), -1), pt(Fr(1, 2), -1))),),
        closed=True,
    )
    with pytest.raises(GeometryError, match="inside square"):
        c.validate_path(bad)


def test_validate_rejects_segment_through_square():
    c = Chart(1)
    bad = Path(
        (
            Leg(
                (
                    pt(Fr(3, 5), Fr(-1, 2)),
                    pt(Fr(7, 5), Fr(1, 2)),
                    pt(Fr(3, 5), Fr(1, 2)),
                    pt(Fr(3, 5), Fr(-1, 2)),
                )
            ),
        ),
        closed=True,
    )
    with pytest.raises(GeometryError):
        c.validate_path(bad)


def test_validate_wall_touch_needs_allowance():
    c = Chart(1)
    touch = pt(Fr(3, 2), -3)
    loop = Path(
        (
            Leg(
                (
                    pt(Fr(13, 10), -2),
                    pt(Fr(17, 10), -2),
                    touch,
                    pt(Fr(13, 10), -2),
                )
            ),
        ),
        closed=True,
    )
    with pytest.raises(GeometryError, match="touches"):
        c.validate_path(loop)
    c.validate_path(loop, allowed_touch=(touch,))


def test_validate_rejects_broken_continuity():
    c = Chart(1)
    bad = Path(
        (
            Leg((pt(Fr(3, 2), -2), pt(Fr(3, 2), -1))),
            Leg((pt(Fr(8, 5), -1), pt(Fr(8, 5), -2))),
        ),
        closed=False,
    )
    with pytest.raises(GeometryError, match="share an endpoint"):
        c.validate_path(bad)


def test_chart_rejects_bad_gate_placement():
    with pytest.raises(ValueError):
        Chart(2, gate_square=2, gate_count=1)
    with pytest.raises(ValueError):
        Chart(0)


# -- crossings ---------------------------------------------------------------


def test_crossing_pair_signs_and_order():
    c = Chart(1)
    a = rect_loop(Fr(1, 5), Fr(-9, 5), Fr(4, 5), Fr(-6, 5))
    b = rect_loop(Fr(3, 5), Fr(-17, 10), Fr(6, 5), Fr(-11, 10))
    found = c.crossings(a, b)
    assert [x.sign for x in found] == [-1, 1]
    assert sum(x.sign for x in found) == 0
    assert found[0].a_pos < found[1].a_pos
    # symmetric query sees the same points with the same total
    sym = c.crossings(b, a)
    assert {x.point for x in sym} == {x.point for x in found}
    assert sum(x.sign for x in sym) == 0


def test_crossing_endpoint_touch_raises():
    c = Chart(1)
    a = Path((Leg((pt(Fr(3, 2), -2), pt(Fr(3, 2), -1))),), closed=False)
    b = Path((Leg((pt(Fr(7, 5), Fr(-3, 2)), pt(Fr(3, 2), Fr(-3, 2)))),), closed=False)
    with pytest.raises(GeometryError, match="endpoint"):
        c.crossings(a, b)


def test_crossing_collinear_overlap_raises():
    c = Chart(1)
    a = Path((Leg((pt(Fr(7, 5), Fr(-3, 2)), pt(Fr(8, 5), Fr(-3, 2)))),), closed=False)
    b = Path((Leg((pt(Fr(3, 2), Fr(-3, 2)), pt(Fr(17, 10), Fr(-3, 2)))),), closed=False)
    with pytest.raises(GeometryError, match="collinear"):
        c.crossings(a, b)


def test_crossing_on_cut_raises():
    c = Chart(1)
    a = Path((Leg((pt(Fr(9, 10), -1), pt(Fr(11, 10), -1))),), closed=False)
    b = Path((Leg((pt(1, Fr(-6, 5)), pt(1, Fr(-4, 5)))),), closed=False)
    with pytest.raises(GeometryError, match="ray"):
        c.crossings(a, b)


# -- Dehn twist by insertion --------------------------------------------------


def test_twist_without_crossings_is_identity():
    c = Chart(2)
    seed = square_ring(1, Fr(3, 10))
    target = square_ring(2, Fr(3, 10))
    assert c.twist(seed, target, 1) is target


def test_twist_single_crossing_inserts_seed_once():
    c = Chart(1)
    seed = square_ring(1, Fr(3, 10))
    target = Path(
        (Leg((c.basepoint, pt(Fr(1, 2), Fr(-11, 40)), pt(Fr(18, 25), Fr(-11, 40)))),),
        closed=False,
    )
    assert c.develop(target) == ()
    assert c.develop(c.twist(seed, target, 1)) == (-1,)
    assert c.develop(c.twist(seed, target, -1)) == (1,)


def test_twist_of_reversed_target_inverts_the_image():
    c = Chart(1)
    seed = square_ring(1, Fr(3, 10))
    target = Path(
        (Leg((c.basepoint, pt(Fr(1, 2), Fr(-11, 40)), pt(Fr(18, 25), Fr(-11, 40)))),),
        closed=False,
    )
    img = c.develop(c.twist(seed, target, 1))
    rev_img = c.develop(c.twist(seed, target.reversed(), 1))
    assert rev_img == tuple(-l for l in reversed(img))


def test_twist_conjugates_a_parallel_based_loop():
    # based loop parallel to the seed: the image word reduces back to the
    # original generator
    c = Chart(1)
    seed = square_ring(1, Fr(3, 10))
    h = Fr(7, 25)
    based = Path(
        (
            Leg((c.basepoint, pt(Fr(1, 2), -h), pt(1 - h, -h))),
            Leg(square_ring(1, h).items[0].points),
            Leg((pt(1 - h, -h), pt(Fr(1, 2), -h), c.basepoint)),
        ),
        closed=False,
    )
    assert c.develop(based) == (1,)
    img = c.develop(c.twist(seed, based, 1))
    assert img == (-1, 1, 1)
    assert word_of(img) == word_of((1,))


def test_twist_preserves_hops_and_validates():
    c = Chart(2, gate_square=1, gate_count=1)
    loop = gate_loop(c, Fr(1, 2))
    seed = square_ring(1, Fr(7, 25))
    twisted = c.twist(seed, loop, 1)
    assert c.develop(twisted) == (-1, 3)
    assert [it for it in twisted.items if isinstance(it, Hop)] == [Hop(1, 1)]
    c.validate_path(twisted)
    assert c.develop(c.twist(seed, loop, -1)) == (1, 3)


# -- randomized sanity --------------------------------------------------------


@given(
    st.integers(87, 111),
    st.integers(4, 9),
    st.integers(-179, -45),
    st.integers(4, 18),
    st.booleans(),
)
def test_free_rectangles_wind_once(x64, w64, y64, h64, ccw):
    c = Chart(1)
    x0, y0 = Fr(x64, 64), Fr(y64, 64)
    loop = rect_loop(x0, y0, x0 + Fr(w64, 64), y0 + Fr(h64, 64), ccw=ccw)
    c.validate_path(loop)
    assert c.develop(loop) == ()
    assert c.winding(loop) == (1 if ccw else -1)
    far = rect_loop(Fr(1, 10), Fr(-29, 10), Fr(3, 10), Fr(-27, 10))
    assert c.crossings(loop, far) == []
