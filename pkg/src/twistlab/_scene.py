"""Exact piecewise-linear charts for surfaces with holes and a plumbing handle.

The plane chart is a rectangle with square holes in a row.  Two designated
adjacent squares may carry "gates" on their bottom edges: paired segments
identified with each other (with reversed tangential parameter), realizing
tunnels between the two squares.  With tunnels the glued surface has genus
one; without, it is planar.

Everything is exact: coordinates are :class:`fractions.Fraction`, paths are
polylines plus gate hops, and all the topology we need is word algebra over
a cut system:

* one vertical cut ray per square, dropped from the square to the bottom
  wall, and one holonomy letter per gate pair.  The chart minus the cuts is
  simply connected, so the homotopy class of a based path is exactly its
  sequence of signed cut crossings (:meth:`Chart.develop`).
* the tangent winding of a closed path is computed as an exact rational
  turning number (signed sweeps through a fixed generic direction), plus a
  half turn per gate transit because the gate identification differential
  is rotation by pi, plus integer trivialization twists along the cuts.
* a Dehn twist acts on paths by inserting a re-rooted traversal of the
  twisting curve at every transversal crossing, with direction given by the
  crossing sign times the twist handedness.  This is homotopy-exact and
  needs no minimal position.

Degenerate configurations (touching endpoints, collinear overlaps, crossings
on cuts) are template bugs, never data: every such case raises
:class:`GeometryError`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "Fr",
    "Point",
    "GeometryError",
    "Leg",
    "Hop",
    "Path",
    "GatePair",
    "Chart",
    "reverse_items",
]

Fr = Fraction
Point = tuple[Fraction, Fraction]


class GeometryError(Exception):
    """A path template violated the chart's genericity requirements."""


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def _cross(a: Point, b: Point) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def _dot(a: Point, b: Point) -> Fraction:
    return a[0] * b[0] + a[1] * b[1]


@dataclass(frozen=True)
class Leg:
    """A polyline piece of a path."""

    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        if len(self.points) < 2:
            raise GeometryError("leg needs at least two points")
        for a, b in zip(self.points, self.points[1:]):
            if a == b:
                raise GeometryError(f"zero-length segment at {a}")

    def segments(self) -> list[tuple[Point, Point]]:
        return list(zip(self.points, self.points[1:]))

    def reversed(self) -> "Leg":
        return Leg(tuple(reversed(self.points)))

    @property
    def start(self) -> Point:
        return self.points[0]

    @property
    def end(self) -> Point:
        return self.points[-1]


@dataclass(frozen=True)
class Hop:
    """A transit through gate pair ``gate``; +1 enters the L side."""

    gate: int
    direction: int

    def __post_init__(self) -> None:
        if self.direction not in (1, -1):
            raise GeometryError("hop direction must be +1 or -1")

    def reversed(self) -> "Hop":
        return Hop(self.gate, -self.direction)


Item = Union[Leg, Hop]


def reverse_items(items: Sequence[Item]) -> tuple[Item, ...]:
    return tuple(item.reversed() for item in reversed(items))


@dataclass(frozen=True)
class Path:
    """A chain of legs and gate hops; closed paths wrap around cyclically."""

    items: tuple[Item, ...]
    closed: bool

    @property
    def start(self) -> Point:
        first = self.items[0]
        assert isinstance(first, Leg)
        return first.start

    @property
    def end(self) -> Point:
        last = self.items[-1]
        assert isinstance(last, Leg)
        return last.end

    def reversed(self) -> "Path":
        return Path(reverse_items(self.items), self.closed)

    def legs(self) -> list[tuple[int, Leg]]:
        return [(i, item) for i, item in enumerate(self.items) if isinstance(item, Leg)]


@dataclass(frozen=True)
class GatePair:
    """Identified segments on the bottom edges of the two gate squares.

    Parameter ``theta`` runs west to east on each side; the identification
    maps L-parameter ``theta`` to R-parameter ``1 - theta``, so the attaching
    differential is rotation by pi (orientation preserving).
    """

    index: int
    left_x0: Fraction
    left_x1: Fraction
    right_x0: Fraction
    right_x1: Fraction
    y: Fraction

    def xl(self, theta: Fraction) -> Fraction:
        return self.left_x0 + theta * (self.left_x1 - self.left_x0)

    def xr(self, theta: Fraction) -> Fraction:
        return self.right_x0 + theta * (self.right_x1 - self.right_x0)

    def theta_of(self, x: Fraction, side: str) -> Fraction:
        if side == "L":
            theta = (x - self.left_x0) / (self.left_x1 - self.left_x0)
        else:
            theta = (x - self.right_x0) / (self.right_x1 - self.right_x0)
        if not (0 < theta < 1):
            raise GeometryError(f"gate {self.index}: transit at boundary parameter {theta}")
        return theta


@dataclass(frozen=True)
class Crossing:
    """A transversal crossing between two paths.

    ``sign`` is the sign of ``cross(d_a, d_b)`` for the segment directions.
    Positions are ``(item index, segment index, parameter)`` on each path.
    """

    point: Point
    sign: int
    a_pos: tuple[int, int, Fraction]
    b_pos: tuple[int, int, Fraction]


# reference direction for turning numbers; steep enough that no template
# edge is parallel to it
_TURN_REF: Point = (Fr(9973), Fr(1))


def _passes(d1: Point, d2: Point, ref: Point = _TURN_REF) -> int:
    """Signed count of sweeps through ``ref`` turning from d1 to d2 (< pi)."""
    c = _cross(d1, d2)
    if c == 0:
        if _dot(d1, d2) > 0:
            return 0
        raise GeometryError("path reverses direction; turning undefined")
    if _cross(d1, ref) == 0 or _cross(d2, ref) == 0:
        raise GeometryError("edge parallel to turning reference direction")
    if c > 0:
        return 1 if _cross(d1, ref) > 0 and _cross(ref, d2) > 0 else 0
    return -1 if _cross(d2, ref) > 0 and _cross(ref, d1) > 0 else 0


def _segment_crossing(
    p: Point, p2: Point, q: Point, q2: Point
) -> tuple[Fraction, Fraction, Point, int] | None:
    """Strictly interior transversal crossing of two segments, or None.

    Any contact that is not strictly interior to both segments (endpoint
    touches, collinear overlaps) raises.
    """
    d1 = _sub(p2, p)
    d2 = _sub(q2, q)
    denom = _cross(d1, d2)
    w = _sub(q, p)
    if denom == 0:
        if _cross(w, d1) != 0:
            return None
        # collinear: reject any overlap or touch
        lo1, hi1 = sorted((_dot(p, d1), _dot(p2, d1)))
        lo2, hi2 = sorted((_dot(q, d1), _dot(q2, d1)))
        if hi1 < lo2 or hi2 < lo1:
            return None
        raise GeometryError(f"collinear contact between segments near {q}")
    t = _cross(w, d2) / denom
    s = _cross(w, d1) / denom
    if t < 0 or t > 1 or s < 0 or s > 1:
        return None
    if t == 0 or t == 1 or s == 0 or s == 1:
        raise GeometryError(f"segments touch at an endpoint near {q}")
    point = (p[0] + t * d1[0], p[1] + t * d1[1])
    return t, s, point, (1 if denom > 0 else -1)


class Chart:
    """The exact plane chart: outer rectangle, square holes, rays, gates."""

    def __init__(
        self,
        squares: int,
        gate_square: int | None = None,
        gate_count: int = 0,
    ) -> None:
        if squares < 1:
            raise ValueError("need at least one square")
        if gate_count and (gate_square is None or not 1 <= gate_square < squares):
            raise ValueError("gate squares must be an adjacent pair inside the row")
        self.squares = squares
        self.gate_square = gate_square if gate_count else None
        self.gate_count = gate_count
        self.xmin, self.xmax = Fr(0), Fr(squares + 1)
        self.ymin, self.ymax = Fr(-3), Fr(3)
        self.half = Fr(1, 4)
        self.basepoint: Point = (Fr(1, 2), Fr(-3))
        self.gates: dict[int, GatePair] = {}
        if gate_count:
            n = gate_square
            spacing = Fr(1, 5 * (gate_count + 1))
            w = spacing / 4
            for j in range(1, gate_count + 1):
                lc = Fr(n) + Fr(1, 5) - j * spacing
                rc = Fr(n + 1) - Fr(1, 5) + j * spacing
                self.gates[j] = GatePair(
                    index=j,
                    left_x0=lc - w,
                    left_x1=lc + w,
                    right_x0=rc - w,
                    right_x1=rc + w,
                    y=-self.half,
                )

    # -- static geometry ---------------------------------------------------

    def square_center(self, i: int) -> Point:
        return (Fr(i), Fr(0))

    def square_edges(self, i: int) -> list[tuple[Point, Point]]:
        h = self.half
        x, y = Fr(i), Fr(0)
        sw, se = (x - h, y - h), (x + h, y - h)
        ne, nw = (x + h, y + h), (x - h, y + h)
        return [(sw, se), (se, ne), (ne, nw), (nw, sw)]

    def ray(self, i: int) -> tuple[Point, Point]:
        return ((Fr(i), -self.half), (Fr(i), self.ymin))

    def rank(self) -> int:
        return self.squares + self.gate_count

    def gate_letter(self, j: int) -> int:
        return self.squares + j

    # -- validation --------------------------------------------------------

    def _point_in_domain(self, p: Point) -> bool:
        return self.xmin <= p[0] <= self.xmax and self.ymin <= p[1] <= self.ymax

    def _point_strictly_inside_square(self, p: Point, i: int) -> bool:
        h = self.half
        return abs(p[0] - i) < h and abs(p[1]) < h

    def _on_gate(self, p: Point) -> tuple[GatePair, str] | None:
        for gp in self.gates.values():
            if p[1] == gp.y:
                if gp.left_x0 < p[0] < gp.left_x1:
                    return gp, "L"
                if gp.right_x0 < p[0] < gp.right_x1:
                    return gp, "R"
        return None

    def validate_path(self, path: Path, allowed_touch: Iterable[Point] = ()) -> None:
        """Continuity, portal consistency, and obstacle checks.

        Path points must stay in the chart, off the squares and walls, except
        for explicitly allowed touch points and the gate endpoints of hops.
        """
        allowed = set(allowed_touch)
        allowed.add(self.basepoint)
        items = path.items
        if not items or not isinstance(items[0], Leg) or not isinstance(items[-1], Leg):
            raise GeometryError("path must start and end with a leg")
        hop_points: set[Point] = set()

        # portal consistency at hop junctions
        count = len(items)
        for idx, item in enumerate(items):
            if not isinstance(item, Hop):
                continue
            prev = items[(idx - 1) % count]
            nxt = items[(idx + 1) % count]
            if not isinstance(prev, Leg) or not isinstance(nxt, Leg):
                raise GeometryError("hop must sit between two legs")
            gp = self.gates.get(item.gate)
            if gp is None:
                raise GeometryError(f"unknown gate {item.gate}")
            entry, exit_ = prev.end, nxt.start
            side_in = "L" if item.direction == 1 else "R"
            if entry[1] != gp.y or exit_[1] != gp.y:
                raise GeometryError(f"gate {item.gate}: transit not on the gate line")
            theta = gp.theta_of(entry[0], side_in)
            mirrored = gp.xr(1 - theta) if side_in == "L" else gp.xl(1 - theta)
            if exit_[0] != mirrored:
                raise GeometryError(
                    f"gate {item.gate}: exit at {exit_[0]} but identification demands {mirrored}"
                )
            din = _sub(prev.points[-1], prev.points[-2])
            dout = _sub(nxt.points[1], nxt.points[0])
            if din[0] != 0 or din[1] <= 0 or dout[0] != 0 or dout[1] >= 0:
                raise GeometryError(f"gate {item.gate}: transit segments must be vertical")
            hop_points.add(entry)
            hop_points.add(exit_)

        # leg-to-leg continuity
        for idx, item in enumerate(items):
            if not isinstance(item, Leg):
                continue
            nxt_idx = (idx + 1) % count
            if nxt_idx == 0 and not path.closed:
                continue
            nxt = items[nxt_idx]
            if isinstance(nxt, Leg) and item.end != nxt.start:
                raise GeometryError("consecutive legs do not share an endpoint")

        # obstacle checks
        ok_touch = allowed | hop_points
        for _, leg in path.legs():
            for p in leg.points:
                if not self._point_in_domain(p):
                    raise GeometryError(f"point {p} outside the chart")
                on_wall = (
                    p[0] == self.xmin or p[0] == self.xmax or p[1] == self.ymin or p[1] == self.ymax
                )
                on_square = False
                for i in range(1, self.squares + 1):
                    if self._point_strictly_inside_square(p, i):
                        raise GeometryError(f"point {p} inside square {i}")
                    h = self.half
                    if abs(p[0] - i) <= h and abs(p[1]) <= h:
                        on_square = True
                if (on_wall or on_square) and p not in ok_touch:
                    raise GeometryError(f"point {p} touches an obstacle")
            for a, b in leg.segments():
                self._segment_clear(a, b, ok_touch)

    def _segment_clear(self, a: Point, b: Point, ok_touch: set[Point]) -> None:
        for i in range(1, self.squares + 1):
            for e0, e1 in self.square_edges(i):
                self._no_contact(a, b, e0, e1, ok_touch, f"square {i}")
        walls = [
            ((self.xmin, self.ymin), (self.xmax, self.ymin)),
            ((self.xmax, self.ymin), (self.xmax, self.ymax)),
            ((self.xmax, self.ymax), (self.xmin, self.ymax)),
            ((self.xmin, self.ymax), (self.xmin, self.ymin)),
        ]
        for e0, e1 in walls:
            self._no_contact(a, b, e0, e1, ok_touch, "outer wall")

    def _no_contact(
        self,
        a: Point,
        b: Point,
        e0: Point,
        e1: Point,
        ok_touch: set[Point],
        what: str,
    ) -> None:
        d1 = _sub(b, a)
        d2 = _sub(e1, e0)
        denom = _cross(d1, d2)
        w = _sub(e0, a)
        if denom == 0:
            if _cross(w, d1) != 0:
                return
            lo1, hi1 = sorted((_dot(a, d1), _dot(b, d1)))
            lo2, hi2 = sorted((_dot(e0, d1), _dot(e1, d1)))
            if hi1 < lo2 or hi2 < lo1:
                return
            raise GeometryError(f"segment runs along {what} near {e0}")
        t = _cross(w, d2) / denom
        s = _cross(w, d1) / denom
        if t < 0 or t > 1 or s < 0 or s > 1:
            return
        point = (a[0] + t * d1[0], a[1] + t * d1[1])
        if point in ok_touch and (t == 0 or t == 1):
            return
        raise GeometryError(f"segment from {a} to {b} meets {what} at {point}")

    # -- development -------------------------------------------------------

    def develop(self, path: Path) -> tuple[int, ...]:
        """Signed cut-crossing letters along the path.

        Letters ``1..squares`` are ray crossings (positive eastward), letters
        ``squares+1..`` are gate transits (positive L to R).
        """
        letters: list[int] = []
        for item in path.items:
            if isinstance(item, Hop):
                letters.append(item.direction * self.gate_letter(item.gate))
                continue
            for a, b in item.segments():
                hits: list[tuple[Fraction, int]] = []
                for i in range(1, self.squares + 1):
                    r0, r1 = self.ray(i)
                    got = _segment_crossing(a, b, r0, r1)
                    if got is None:
                        continue
                    t, _, _, _ = got
                    dx = b[0] - a[0]
                    if dx == 0:
                        raise GeometryError(f"segment runs along ray {i}")
                    hits.append((t, i if dx > 0 else -i))
                hits.sort()
                letters.extend(letter for _, letter in hits)
        return tuple(letters)

    # -- turning and winding -----------------------------------------------

    def winding(
        self,
        path: Path,
        gate_twists: dict[int, int] | None = None,
        ray_twists: dict[int, int] | None = None,
    ) -> Fraction:
        """Exact tangent winding of a closed path in the chart trivialization.

        ``gate_twists[j]`` and ``ray_twists[i]`` are the integer turns the
        trivialization adds per signed transit or crossing of that cut.
        """
        if not path.closed:
            raise GeometryError("winding requires a closed path")
        gate_twists = gate_twists or {}
        ray_twists = ray_twists or {}
        total = Fr(0)

        # cut contributions
        for letter in self.develop(path):
            idx = abs(letter)
            sign = 1 if letter > 0 else -1
            if idx > self.squares:
                total += sign * (Fr(1, 2) + gate_twists.get(idx - self.squares, 1))
            else:
                total += sign * ray_twists.get(idx, 0)

        # flat turning over the cyclic edge sequence; each hop rotates the
        # chart frame by pi, tracked as a sign on subsequent directions (the
        # sweep of the pi jump itself is the 1/2 + k term above)
        dirs: list[Point] = []
        parity = 1
        for item in path.items:
            if isinstance(item, Hop):
                parity = -parity
                continue
            for a, b in item.segments():
                d = _sub(b, a)
                dirs.append((parity * d[0], parity * d[1]))
        if parity != 1:
            # odd number of hops: directions only close up modulo the flip;
            # traverse the doubled cycle and halve
            doubled = dirs + [(-x, -y) for x, y in dirs]
            turn = sum(
                _passes(doubled[i], doubled[(i + 1) % len(doubled)]) for i in range(len(doubled))
            )
            total += Fr(turn, 2)
        else:
            turn = sum(_passes(dirs[i], dirs[(i + 1) % len(dirs)]) for i in range(len(dirs)))
            total += turn
        return total

    # -- crossings ---------------------------------------------------------

    def crossings(self, a: Path, b: Path) -> list[Crossing]:
        """All crossings between two paths, sorted along ``a``.

        Crossing points must be transversal, interior to both segments, and
        off every cut; anything else raises.
        """
        found: list[Crossing] = []
        for ai, aleg in a.legs():
            for si, (p, p2) in enumerate(aleg.segments()):
                for bi, bleg in b.legs():
                    for sj, (q, q2) in enumerate(bleg.segments()):
                        got = _segment_crossing(p, p2, q, q2)
                        if got is None:
                            continue
                        t, s, point, sign = got
                        self._assert_off_cuts(point)
                        found.append(
                            Crossing(point, sign, (ai, si, t), (bi, sj, s))
                        )
        found.sort(key=lambda c: c.a_pos)
        return found

    def _assert_off_cuts(self, point: Point) -> None:
        for i in range(1, self.squares + 1):
            (x, y0), (_, y1) = self.ray(i)
            if point[0] == x and y1 <= point[1] <= y0:
                raise GeometryError(f"crossing point {point} lies on ray {i}")
        for gp in self.gates.values():
            if point[1] == gp.y and (
                gp.left_x0 <= point[0] <= gp.left_x1 or gp.right_x0 <= point[0] <= gp.right_x1
            ):
                raise GeometryError(f"crossing point {point} lies on gate {gp.index}")

    # -- Dehn twist by insertion --------------------------------------------

    def twist(self, seed: Path, target: Path, handedness: int) -> Path:
        """Image of ``target`` under the Dehn twist along closed ``seed``.

        At every crossing a full re-rooted traversal of ``seed`` is inserted,
        in the direction ``handedness * crossing sign``.
        """
        if not seed.closed:
            raise GeometryError("twisting curve must be closed")
        if handedness not in (1, -1):
            raise ValueError("handedness must be +1 or -1")
        crossings = self.crossings(target, seed)
        if not crossings:
            return target
        by_pos: dict[tuple[int, int], list[Crossing]] = {}
        for c in crossings:
            by_pos.setdefault((c.a_pos[0], c.a_pos[1]), []).append(c)
        for lst in by_pos.values():
            lst.sort(key=lambda c: c.a_pos[2])

        new_items: list[Item] = []
        for idx, item in enumerate(target.items):
            if isinstance(item, Hop):
                new_items.append(item)
                continue
            pending: list[Point] = [item.points[0]]
            for si, (p, p2) in enumerate(item.segments()):
                for c in by_pos.get((idx, si), ()):
                    if c.point != pending[-1]:
                        pending.append(c.point)
                    if len(pending) >= 2:
                        new_items.append(Leg(tuple(pending)))
                    inserted = _reroot(seed, c.b_pos, c.point, handedness * c.sign)
                    new_items.extend(inserted)
                    pending = [c.point]
                if p2 != pending[-1]:
                    pending.append(p2)
            if len(pending) >= 2:
                new_items.append(Leg(tuple(pending)))
        return Path(tuple(new_items), target.closed)


def _reroot(
    seed: Path, pos: tuple[int, int, Fraction], point: Point, direction: int
) -> tuple[Item, ...]:
    """A full traversal of closed ``seed`` starting and ending at ``point``."""
    item_idx, seg_idx, _ = pos
    items = seed.items
    leg = items[item_idx]
    assert isinstance(leg, Leg)
    head_pts = leg.points[: seg_idx + 1] + (point,)
    tail_pts = (point,) + leg.points[seg_idx + 1 :]
    out: list[Item] = []
    if len(tail_pts) >= 2:
        out.append(Leg(tail_pts))
    out.extend(items[item_idx + 1 :])
    out.extend(items[:item_idx])
    if len(head_pts) >= 2:
        out.append(Leg(head_pts))
    forward = tuple(out)
    if direction == 1:
        return forward
    return reverse_items(forward)
