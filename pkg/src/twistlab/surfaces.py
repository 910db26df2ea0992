"""Parametric surface models with a named seed-curve catalog.

Two model families share one exact engine:

* planar models: a disk with ``n`` holes in a row (:func:`build_planar`);
* genus-1 fiber models: two designated adjacent holes joined by a stack of
  bands through portal gates (:func:`build_fiber`), derived from a 3-legged
  plumbing graph.

Every curve the calculus needs is a registered seed with a frozen exact
template in the chart.  A seed entry carries the curve's based loop word,
its homology class, its tangent winding, and the marked mapping class of
its right-handed Dehn twist, extracted geometrically by twisting a probe
system (one based loop per free generator, one arc per inner boundary).

The build runs a battery of structural checks: probe developments, winding
normalization, the skew pairing against engine crossing signs, and the
boundary factorization (outer word = ordered product of based hole words,
with one handle commutator in the genus-1 case).  A failure raises
:class:`ModelError`; a built model is immutable and safe to share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

from ._scene import Chart, Fr, Hop, Leg, Path, Point
from .fatgroup import FreeAut, MarkedClass, Word

__all__ = [
    "SeedKind",
    "Seed",
    "Image",
    "CurveRef",
    "ResolutionGraph",
    "SeedEntry",
    "SurfaceModel",
    "ModelError",
    "build_planar",
    "build_fiber",
    "seed_twist",
    "homology_class",
    "pairing",
    "winding_number",
]


class ModelError(Exception):
    """A surface model failed one of its build-time consistency checks."""


class SeedKind:
    """Seed curve kinds; values double as the word-syntax prefixes."""

    ALPHA = "a"
    BETA = "b"
    GAMMA = "g"
    DELTA = "d"
    GAMMA_NECK = "n"
    HANDLE_BETA = "h"
    INNER_BOUNDARY = "ib"
    OUTER_BOUNDARY = "ob"
    PAIR = "x"
    INTERVAL = "v"

    ALL = (
        ALPHA,
        BETA,
        GAMMA,
        DELTA,
        GAMMA_NECK,
        HANDLE_BETA,
        INNER_BOUNDARY,
        OUTER_BOUNDARY,
        PAIR,
        INTERVAL,
    )


@dataclass(frozen=True)
class Seed:
    """A catalog curve: ``kind`` plus an index.

    Pair seeds index by a hole pair ``(i, j)``; all other kinds by one int.
    """

    kind: str
    index: Union[int, tuple] = 1

    def __post_init__(self) -> None:
        if self.kind not in SeedKind.ALL:
            raise ValueError(f"unknown seed kind {self.kind!r}")


@dataclass(frozen=True)
class Image:
    """The image of ``base`` under the mapping class of ``prefix``.

    ``prefix`` is a twist word; it is evaluated by the word calculus, so the
    surface layer treats it as opaque.
    """

    prefix: object
    base: "CurveRef"


CurveRef = Union[Seed, Image]


@dataclass(frozen=True)
class SeedEntry:
    """Catalog data for one seed curve."""

    loop_word: Word
    h1_class: tuple
    winding: int
    twist: MarkedClass


@dataclass(frozen=True)
class ResolutionGraph:
    """A 3-legged plumbing graph with a central vertex of degree -2.

    Legs are listed center-adjacent first.  The first two legs prolong the
    horizontal hole run; the third leg hangs the band stack.
    """

    legs: tuple
    center: int = -2
    family: Optional[str] = None
    p: int = 0
    q: int = 0
    r: int = 0

    def __post_init__(self) -> None:
        legs = tuple(tuple(int(d) for d in leg) for leg in self.legs)
        object.__setattr__(self, "legs", legs)
        if len(legs) != 3 or any(len(leg) == 0 for leg in legs):
            raise ValueError("graph needs exactly three non-empty legs")
        if self.center != -2:
            raise ValueError("central vertex degree must be -2")
        for leg in legs:
            for d in leg:
                if d > -2:
                    raise ValueError(f"vertex degree {d} is not <= -2")

    # vertex 0 is the center, then legs in order
    def vertices(self) -> list:
        out = [self.center]
        for leg in self.legs:
            out.extend(leg)
        return out

    def edges(self) -> list:
        out = []
        pos = 1
        for leg in self.legs:
            out.append((0, pos))
            for k in range(len(leg) - 1):
                out.append((pos + k, pos + k + 1))
            pos += len(leg)
        return out

    def fiber_shape(self) -> tuple:
        """(run length, neck index, band count) for the genus-1 fiber.

        The horizontal chain is leg1 reversed, center, leg2; hole positions
        telescope as P_1 = d_1 - 1, P_m = P_{m-1} + d_m - 2.  The band count
        comes from the third leg the same way.
        """
        a, b, c = self.legs
        chain = [-d for d in reversed(a)] + [-self.center] + [-d for d in b]
        pos = chain[0] - 1
        neck = None
        for at, d in enumerate(chain[1:], start=1):
            if at == len(a):
                neck = pos
            pos += d - 2
        if neck is None:
            neck = pos
        run = pos
        upper = sum(-d for d in c) - 2 * len(c)
        bands = upper + 1
        if bands < 1 or neck < 1 or neck + 1 > run:
            raise ValueError("graph shape does not produce a valid fiber layout")
        return run, neck, bands

    @staticmethod
    def from_dict(data: dict) -> "ResolutionGraph":
        if "legs" in data:
            return ResolutionGraph(
                legs=tuple(tuple(leg) for leg in data["legs"]),
                center=data.get("center", -2),
                family=data.get("family"),
                p=data.get("p", 0),
                q=data.get("q", 0),
                r=data.get("r", 0),
            )
        raise ValueError("graph dict needs a 'legs' entry (or use a family tag upstream)")


# -- exact template constants -------------------------------------------------

_HALF_ALPHA = Fr(7, 20)
_GAMMA_X0 = Fr(2, 5)
_LANE_BETA = Fr(-27, 100)
_LANE_SLOTPAR = Fr(-63, 250)
_LANE_HANDLE = Fr(-3, 10)
_LANE_MERGED_PAR = Fr(-281, 1000)
_LANE_DELTA = Fr(-31, 100)
_LANE_PROBE_GATE = Fr(-57, 200)
_RING_MERGED = Fr(28, 100)
_MAX_RUN = 25
_MAX_BANDS = 20
_MAX_PAIR = 10


def _pp(x, y) -> Point:
    return (Fr(x), Fr(y))


def _loop(points: Iterable[Point]) -> Path:
    return Path((Leg(tuple(points)),), closed=True)


def _rect(x0, y0, x1, y1) -> Path:
    sw, se, ne, nw = _pp(x0, y0), _pp(x1, y0), _pp(x1, y1), _pp(x0, y1)
    return _loop((sw, se, ne, nw, sw))


def _word(letters: Iterable[int]) -> Word:
    return Word(tuple(letters))


def _cyclic_reduce(w: Word) -> Word:
    letters = list(w.letters)
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        letters = letters[1:-1]
    return Word(tuple(letters))


def _cyclically_equal(a: Word, b: Word, allow_inverse: bool = False) -> bool:
    ra = _cyclic_reduce(a).letters
    rb = _cyclic_reduce(b).letters
    candidates = [rb]
    if allow_inverse:
        candidates.append(_cyclic_reduce(Word(rb).inv()).letters)
    for target in candidates:
        if len(ra) != len(target):
            continue
        if not target and not ra:
            return True
        for shift in range(len(target)):
            if ra == target[shift:] + target[:shift]:
                return True
    return False


# -- seed curve templates ------------------------------------------------------


def _hole_ring(i: int) -> Path:
    h = _HALF_ALPHA
    return _rect(i - h, -h, i + h, h)


def _enclosing_box(k: int) -> Path:
    # encircles holes 1..k; nested tops and bottoms keep distinct boxes apart
    off = Fr(k, 1000)
    return _rect(_GAMMA_X0 - off, -Fr(3, 5) - off, k + Fr(1, 2), _GAMMA_X0 + off)


def _pair_curve(i: int, j: int) -> Path:
    if not (1 <= i < j <= _MAX_PAIR):
        raise ModelError("pair curve indices out of the supported range")
    kap = Fr(10 * i + j, 2000)
    u = Fr(41, 100) + kap
    h = Fr(42, 100) + kap
    if j == i + 1:
        return _rect(i - u, -h, j + u, h)
    b0 = Fr(37, 100) + kap / 2 + Fr(1, 7000)
    b1 = Fr(2, 5) + kap / 2 + Fr(1, 7000)
    pts = (
        _pp(i - u, -h),
        _pp(i + u, -h),
        _pp(i + u, b0),
        _pp(j - u, b0),
        _pp(j - u, -h),
        _pp(j + u, -h),
        _pp(j + u, h),
        _pp(j - u, h),
        _pp(j - u, b1),
        _pp(i + u, b1),
        _pp(i + u, h),
        _pp(i - u, h),
        _pp(i - u, -h),
    )
    return _loop(pts)


def _interval_box(i: int, j: int) -> Path:
    if not (1 <= i < j <= _MAX_PAIR):
        raise ModelError("interval box indices out of the supported range")
    kap = Fr(10 * i + j, 5000)
    # the 1/70000 shifts keep box edges off the probe lane at -1/2 and off
    # enclosing-box edges at k + 1/2 for every index pair up to _MAX_PAIR
    u = Fr(48, 100) + kap + Fr(1, 70000)
    h = Fr(49, 100) + kap / 2 + Fr(1, 70000)
    return _rect(i - u, -h, j + u, h)


def _outer_parallel(chart: Chart) -> Path:
    d = Fr(1, 8)
    return _rect(chart.xmin + d, chart.ymin + d, chart.xmax - d, chart.ymax - d)


def _gap_loop(chart: Chart, j: int, theta: Fraction, lane: Fraction) -> Path:
    """Single-gate loop: up the L side, through, back across the gap."""
    gp = chart.gates[j]
    xl, xr = gp.xl(theta), gp.xr(1 - theta)
    return Path(
        (
            Leg(((xl, lane), (xl, gp.y))),
            Hop(j, 1),
            Leg(((xr, gp.y), (xr, lane), (xl, lane))),
        ),
        closed=True,
    )


def _band_loop(chart: Chart, jf: int, jb: int, th_f: Fraction, th_b: Fraction, lane: Fraction) -> Path:
    """Two-gate loop: gate ``jf`` forward, gate ``jb`` backward.

    Connectors stay inside their own gate cluster, so the loop never crosses
    the gap between the two joined holes.
    """
    gp_f, gp_b = chart.gates[jf], chart.gates[jb]
    xlf, xrf = gp_f.xl(th_f), gp_f.xr(1 - th_f)
    xlb, xrb = gp_b.xl(th_b), gp_b.xr(1 - th_b)
    return Path(
        (
            Leg(((xlf, lane), (xlf, gp_f.y))),
            Hop(jf, 1),
            Leg(((xrf, gp_f.y), (xrf, lane), (xrb, lane), (xrb, gp_b.y))),
            Hop(jb, -1),
            Leg(((xlb, gp_b.y), (xlb, lane), (xlf, lane))),
        ),
        closed=True,
    )


def _merged_parallel(chart: Chart, jitter: Fraction = Fr(0)) -> Path:
    """Curve parallel to the merged boundary of the two joined holes.

    ``jitter`` redraws the same curve on displaced lanes; the build compares
    the two windings as a drawing-independence check.
    """
    n, bands = chart.gate_square, chart.gate_count
    g1, gh = chart.gates[1], chart.gates[bands]
    lane = _LANE_MERGED_PAR - jitter
    ring = _RING_MERGED + jitter
    x_exit1 = g1.xl(Fr(7, 12) + jitter)
    x_in1 = g1.xr(Fr(5, 12) - jitter)
    x_inh = gh.xl(Fr(5, 8) + jitter)
    x_outh = gh.xr(Fr(3, 8) - jitter)
    y = g1.y
    return Path(
        (
            Leg(
                (
                    (x_exit1, lane),
                    (Fr(n) + ring, lane),
                    (Fr(n) + ring, ring),
                    (Fr(n) - ring, ring),
                    (Fr(n) - ring, lane),
                    (x_inh, lane),
                    (x_inh, y),
                )
            ),
            Hop(bands, 1),
            Leg(
                (
                    (x_outh, y),
                    (x_outh, lane),
                    (Fr(n + 1) + ring, lane),
                    (Fr(n + 1) + ring, ring),
                    (Fr(n + 1) - ring, ring),
                    (Fr(n + 1) - ring, lane),
                    (x_in1, lane),
                    (x_in1, y),
                )
            ),
            Hop(1, -1),
            Leg(((x_exit1, y), (x_exit1, lane))),
        ),
        closed=True,
    )


# -- probe and arc templates ---------------------------------------------------


def _probe_ray(chart: Chart, i: int) -> Path:
    """Based loop developing to exactly the ray letter ``i``."""
    top = 1 + Fr(i, 100)
    back = top + Fr(1, 200)
    xr = Fr(1, 2) + Fr(i, 200)
    pts = (
        chart.basepoint,
        _pp(Fr(1, 2), top),
        _pp(i - Fr(2, 5), top),
        _pp(i - Fr(2, 5), Fr(-1, 2)),
        _pp(i + Fr(2, 5), Fr(-1, 2)),
        _pp(i + Fr(2, 5), back),
        _pp(xr, back),
        _pp(xr, Fr(-29, 10) - Fr(i, 1000)),
        chart.basepoint,
    )
    return Path((Leg(pts),), closed=False)


def _probe_gate(chart: Chart, j: int) -> Path:
    """Based loop developing to exactly the gate letter ``j``."""
    n = chart.gate_square
    gp = chart.gates[j]
    top = Fr(3, 5) + Fr(j, 1000)
    lane = _LANE_PROBE_GATE - Fr(j, 2500)
    lane2 = lane - Fr(1, 20000)
    xl, xr = gp.xl(Fr(1, 2)), gp.xr(Fr(1, 2))
    xret = Fr(1, 2) + Fr(j, 1000)
    return Path(
        (
            Leg(
                (
                    chart.basepoint,
                    _pp(Fr(1, 2), top),
                    _pp(n + Fr(9, 20), top),
                    _pp(n + Fr(9, 20), lane),
                    (xl, lane),
                    (xl, gp.y),
                )
            ),
            Hop(j, 1),
            Leg(
                (
                    (xr, gp.y),
                    (xr, lane2),
                    _pp(n + Fr(11, 20), lane2),
                    _pp(n + Fr(11, 20), top + Fr(1, 2000)),
                    _pp(xret, top + Fr(1, 2000)),
                    _pp(xret, Fr(-29, 10) - Fr(j, 2000)),
                    chart.basepoint,
                )
            ),
        ),
        closed=False,
    )


def _arc_row(chart: Chart, i: int) -> tuple:
    lane = Fr(-9, 20) - Fr(i, 1000)
    end = _pp(i - Fr(1, 4), 0)
    pts = (
        chart.basepoint,
        _pp(Fr(1, 2), lane),
        _pp(i - Fr(9, 20), lane),
        _pp(i - Fr(9, 20), 0),
        end,
    )
    return Path((Leg(pts),), closed=False), end


def _arc_slot(chart: Chart, m: int) -> tuple:
    lane = Fr(-12, 25) - Fr(m, 2500)
    lo, hi = chart.gates[m + 1], chart.gates[m]
    x = (lo.left_x1 + hi.left_x0) / 2
    end = (x, Fr(-1, 4))
    pts = (chart.basepoint, _pp(Fr(1, 2), lane), (x, lane), end)
    return Path((Leg(pts),), closed=False), end


def _arc_merged(chart: Chart) -> tuple:
    n = chart.gate_square
    lane = Fr(-478, 1000)
    x = (chart.gates[1].left_x1 + (Fr(n) + Fr(1, 4))) / 2
    end = (x, Fr(-1, 4))
    pts = (chart.basepoint, _pp(Fr(1, 2), lane), (x, lane), end)
    return Path((Leg(pts),), closed=False), end


# -- check loop templates --------------------------------------------------------


def _check_row(chart: Chart, i: int) -> Path:
    """Loop around hole ``i`` under holes 1..i-1, back over the top."""
    deep = Fr(-13, 25) - Fr(i, 1000)
    deep2 = deep - Fr(1, 10000)
    shallow = Fr(-13, 50) - Fr(i, 2500)
    high = Fr(1, 2) + Fr(i, 1000)
    ret = Fr(1, 2) + Fr(3, 2500)
    pts = (
        chart.basepoint,
        _pp(Fr(1, 2), deep),
        _pp(i - Fr(9, 20), deep),
        _pp(i - Fr(9, 20), shallow),
        _pp(i + Fr(9, 20), shallow),
        _pp(i + Fr(9, 20), high),
        _pp(i - Fr(23, 50), high),
        _pp(i - Fr(23, 50), deep2),
        _pp(ret, deep2),
        _pp(ret, Fr(-29, 10) - Fr(i, 2000)),
        chart.basepoint,
    )
    return Path((Leg(pts),), closed=True)


def _check_slot(chart: Chart, m: int) -> Path:
    n = chart.gate_square
    gp_m, gp_m1 = chart.gates[m], chart.gates[m + 1]
    deep = Fr(-11, 20) - Fr(m, 1000)
    deep2 = deep - Fr(1, 10000)
    sh = Fr(-2522, 10000) - Fr(m, 2500)
    sh2 = sh - Fr(1, 50000)
    gap_in = Fr(n) + Fr(12, 25) + Fr(m, 2500)
    gap_out = gap_in + Fr(1, 5000)
    xl_m, xr_m = gp_m.xl(Fr(1, 40)), gp_m.xr(Fr(39, 40))
    xr_m1, xl_m1 = gp_m1.xr(Fr(1, 40)), gp_m1.xl(Fr(39, 40))
    return Path(
        (
            Leg(
                (
                    chart.basepoint,
                    _pp(Fr(1, 2), deep),
                    (gap_in, deep),
                    (gap_in, sh),
                    (xl_m, sh),
                    (xl_m, gp_m.y),
                )
            ),
            Hop(m, 1),
            Leg(((xr_m, gp_m.y), (xr_m, sh), (xr_m1, sh), (xr_m1, gp_m1.y))),
            Hop(m + 1, -1),
            Leg(
                (
                    (xl_m1, gp_m1.y),
                    (xl_m1, sh2),
                    (gap_out, sh2),
                    (gap_out, deep2),
                    _pp(Fr(1, 2) + Fr(1, 800), deep2),
                    _pp(Fr(1, 2) + Fr(1, 800), Fr(-291, 100) - Fr(m, 2000)),
                    chart.basepoint,
                )
            ),
        ),
        closed=True,
    )


def _check_merged(chart: Chart) -> Path:
    n, bands = chart.gate_square, chart.gate_count
    g1, gh = chart.gates[1], chart.gates[bands]
    deep = Fr(-23, 40)
    deep2 = deep - Fr(1, 10000)
    up_lane = Fr(-2835, 10000)
    dn_lane = Fr(-2845, 10000)
    under = Fr(-2846, 10000)
    over = Fr(2856, 10000)
    ring = Fr(285, 1000)
    stem_col = Fr(n) + Fr(468, 1000)
    west_col = Fr(n) - Fr(464, 1000)
    exit_col = Fr(n) + Fr(3, 10)
    ret = Fr(1, 2) + Fr(1, 600)
    xlh, xrh = gh.xl(Fr(7, 10)), gh.xr(Fr(3, 10))
    xr1, xl1 = g1.xr(Fr(9, 20)), g1.xl(Fr(11, 20))
    return Path(
        (
            Leg(
                (
                    chart.basepoint,
                    _pp(Fr(1, 2), deep),
                    (stem_col, deep),
                    (stem_col, over),
                    (west_col, over),
                    (west_col, under),
                    (xlh, under),
                    (xlh, gh.y),
                )
            ),
            Hop(bands, 1),
            Leg(
                (
                    (xrh, gh.y),
                    (xrh, up_lane),
                    (Fr(n + 1) + ring, up_lane),
                    (Fr(n + 1) + ring, over),
                    (Fr(n + 1) - ring, over),
                    (Fr(n + 1) - ring, dn_lane),
                    (xr1, dn_lane),
                    (xr1, g1.y),
                )
            ),
            Hop(1, -1),
            Leg(
                (
                    (xl1, g1.y),
                    (xl1, dn_lane),
                    (exit_col, dn_lane),
                    (exit_col, deep2),
                    (ret, deep2),
                    (ret, Fr(-293, 100)),
                    chart.basepoint,
                )
            ),
        ),
        closed=True,
    )


def _check_outer(chart: Chart) -> Path:
    d = Fr(1, 16)
    lane = chart.ymin + d
    pts = (
        chart.basepoint,
        _pp(Fr(1, 2), lane + Fr(1, 1000)),
        _pp(chart.xmax - d, lane + Fr(1, 1000)),
        _pp(chart.xmax - d, chart.ymax - d),
        _pp(chart.xmin + d, chart.ymax - d),
        _pp(chart.xmin + d, lane),
        _pp(Fr(1, 2) - Fr(1, 1000), lane),
        chart.basepoint,
    )
    return Path((Leg(pts),), closed=True)


# -- the model -------------------------------------------------------------------


class SurfaceModel:
    """An immutable surface model with its seed catalog.

    Homology classes are reported in the public basis: one class per inner
    hole in layout order, then the handle classes u, v when genus is 1.
    """

    def __init__(
        self,
        genus: int,
        chart: Chart,
        neck: Optional[int],
        run_length: int,
        bands: int,
        boundary_names: tuple,
        paths: dict,
        aliases: dict,
        windings: dict,
        probes: list,
        arcs: list,
        arc_touches: dict,
        checks: dict,
        outer_word: Word,
        hole_words: tuple,
        handle_words: Optional[tuple],
        basis_cols: tuple,
        gram_chart: tuple,
    ) -> None:
        self.genus = genus
        self.chart = chart
        self.neck = neck
        self.run_length = run_length
        self.bands = bands
        self.boundary_names = boundary_names
        self.outer_word = outer_word
        self.hole_words = hole_words
        self.handle_words = handle_words
        self._paths = paths
        self._aliases = aliases
        self._windings = windings
        self._probes = probes
        self._arcs = arcs
        self._arc_touches = arc_touches
        self._checks = checks
        self._arc_words = [_word(chart.develop(a)) for a in arcs]
        self._gram_chart = gram_chart
        self._basis = basis_cols
        self._basis_inv = _integer_inverse(basis_cols)
        self._gram_public = _conjugate_form(gram_chart, basis_cols)
        self._entries: dict = {}

    # -- structural numbers --

    @property
    def rank(self) -> int:
        return self.chart.rank()

    @property
    def holes(self) -> int:
        return len(self.boundary_names)

    def b1(self) -> int:
        return 2 * self.genus + self.holes

    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus - (self.holes + 1)

    # -- seed registry --

    def seeds(self) -> list:
        out = list(self._paths.keys()) + list(self._aliases.keys())
        return [Seed(kind, idx) for kind, idx in out]

    def _canonical(self, ref: Seed) -> tuple:
        index = ref.index
        if ref.kind in (SeedKind.PAIR, SeedKind.INTERVAL) and isinstance(index, tuple):
            index = tuple(sorted(index))
        key = (ref.kind, index)
        seen = set()
        while key in self._aliases:
            if key in seen:
                raise ModelError(f"alias cycle at {key}")
            seen.add(key)
            key = self._aliases[key]
        if key not in self._paths:
            raise ModelError(f"seed {ref.kind}{ref.index} is not in this model's catalog")
        return key

    def seed_path(self, ref: Seed) -> Path:
        return self._paths[self._canonical(ref)]

    def boundary_check(self, name: str) -> Path:
        if name not in self._checks:
            raise ModelError(f"no boundary check named {name!r}")
        return self._checks[name]

    def seed(self, ref: Seed) -> SeedEntry:
        key = self._canonical(ref)
        if key in self._entries:
            return self._entries[key]
        path = self._paths[key]
        word = _word(self.chart.develop(path))
        cls = self._class_public(word)
        twist = self._twist_from_path(path, word)
        entry = SeedEntry(loop_word=word, h1_class=cls, winding=self._windings[key], twist=twist)
        self._entries[key] = entry
        return entry

    # -- homology --

    def _class_chart(self, word: Word) -> tuple:
        return word.exponent_sums(self.rank)

    def _class_public(self, word: Word) -> tuple:
        return _mat_vec(self._basis_inv, self._class_chart(word))

    def pairing(self, x: Iterable[int], y: Iterable[int]) -> int:
        x, y = list(x), list(y)
        g = self._gram_public
        return sum(x[a] * g[a][b] * y[b] for a in range(len(x)) for b in range(len(y)))

    def chart_pairing(self, x: Iterable[int], y: Iterable[int]) -> int:
        x, y = list(x), list(y)
        g = self._gram_chart
        return sum(x[a] * g[a][b] * y[b] for a in range(len(x)) for b in range(len(y)))

    # -- twist extraction --

    def _twist_from_path(self, path: Path, word: Word) -> MarkedClass:
        images, inverses = [], []
        for probe in self._probes:
            images.append(_word(self.chart.develop(self.chart.twist(path, probe, 1))))
            inverses.append(_word(self.chart.develop(self.chart.twist(path, probe, -1))))
        aut = FreeAut(self.rank, tuple(images), tuple(inverses))
        if not aut.check_inverse():
            raise ModelError("twist images and inverse images do not invert each other")
        prefixes = []
        for arc, arc_word in zip(self._arcs, self._arc_words):
            moved = _word(self.chart.develop(self.chart.twist(path, arc, 1)))
            prefixes.append(moved * arc_word.inv())
        cls = MarkedClass(aut, tuple(prefixes))
        if aut.apply(self.outer_word) != self.outer_word:
            raise ModelError("seed twist does not fix the outer boundary word")
        expected = _transvection(self._gram_chart, self._class_chart(word))
        if aut.abelianized() != expected:
            raise ModelError("seed twist abelianization is not the expected transvection")
        return cls

    def describe(self) -> dict:
        return {
            "genus": self.genus,
            "holes": self.holes,
            "b1": self.b1(),
            "euler_characteristic": self.euler_characteristic(),
            "neck": self.neck,
            "run_length": self.run_length,
            "bands": self.bands,
            "boundaries": list(self.boundary_names),
        }


# -- linear algebra helpers (exact integer) ------------------------------------


def _mat_vec(m: tuple, v: tuple) -> tuple:
    n = len(v)
    return tuple(sum(m[r][c] * v[c] for c in range(n)) for r in range(len(m)))


def _integer_inverse(cols: tuple) -> tuple:
    """Inverse of the unimodular matrix whose columns are ``cols``."""
    import sympy

    n = len(cols)
    m = sympy.Matrix(n, n, lambda r, c: cols[c][r])
    det = m.det()
    if det not in (1, -1):
        raise ModelError(f"basis matrix is not unimodular (det {det})")
    inv = m.inv()
    out = tuple(tuple(int(inv[r, c]) for c in range(n)) for r in range(n))
    check = sympy.Matrix(n, n, lambda r, c: out[r][c]) * m
    if check != sympy.eye(n):
        raise ModelError("basis inversion failed its reconstruction check")
    return out


def _conjugate_form(g: tuple, cols: tuple) -> tuple:
    n = len(cols)
    out = []
    for a in range(n):
        row = []
        for b in range(n):
            row.append(
                sum(cols[a][i] * g[i][j] * cols[b][j] for i in range(n) for j in range(n))
            )
        out.append(tuple(row))
    return tuple(out)


def _transvection(g: tuple, c: tuple) -> tuple:
    """Matrix of x -> x + <x, c> c in the chart basis, column convention."""
    n = len(c)
    cols = []
    for b in range(n):
        pair = sum(g[b][j] * c[j] for j in range(n))
        cols.append(tuple((1 if i == b else 0) + pair * c[i] for i in range(n)))
    return tuple(tuple(cols[b][r] for b in range(n)) for r in range(n))


def _gram_matrix(rank: int, run: int, neck: Optional[int]) -> tuple:
    """Skew pairing of the chart letters.

    Ray classes pair to zero with each other, as do gate classes; a ray
    letter pairs with every gate letter exactly when it sits at the neck:
    +1 for the left joined hole, -1 for the right one.
    """
    g = [[0] * rank for _ in range(rank)]
    if neck is not None:
        for j in range(run, rank):
            g[neck - 1][j] = 1
            g[j][neck - 1] = -1
            g[neck][j] = -1
            g[j][neck] = 1
    return tuple(tuple(row) for row in g)


def _chart_class(chart: Chart, path: Path) -> tuple:
    vec = [0] * chart.rank()
    for letter in chart.develop(path):
        vec[abs(letter) - 1] += 1 if letter > 0 else -1
    return tuple(vec)


# -- build-time verification ----------------------------------------------------


def _normalize_winding(chart: Chart, path: Path) -> tuple:
    w = chart.winding(path)
    if w == 1:
        return path, 1
    if w == -1:
        flipped = path.reversed()
        if chart.winding(flipped) != 1:
            raise ModelError("winding did not flip sign under reversal")
        return flipped, 1
    raise ModelError(f"seed template has winding {w}, expected +-1")


def _verify_pairing(model_gram: tuple, chart: Chart, pairs: Iterable[tuple], classes: dict) -> None:
    for key_a, key_b, path_a, path_b in pairs:
        total = sum(c.sign for c in chart.crossings(path_a, path_b))
        ca, cb = classes[key_a], classes[key_b]
        rank = len(ca)
        expected = sum(
            ca[i] * model_gram[i][j] * cb[j] for i in range(rank) for j in range(rank)
        )
        if total != expected:
            raise ModelError(
                f"pairing mismatch between {key_a} and {key_b}: crossings {total}, form {expected}"
            )


# -- planar builder ---------------------------------------------------------------


def build_planar(n: int) -> SurfaceModel:
    """A disk with ``n`` holes in a row, with its standard seed catalog."""
    if n < 1:
        raise ValueError("need at least one hole")
    if n > _MAX_RUN:
        raise ValueError(f"hole count {n} above the supported maximum {_MAX_RUN}")
    chart = Chart(n)

    paths: dict = {}
    aliases: dict = {}
    windings: dict = {}

    def register(kind: str, index, path: Path, touches=()):
        chart.validate_path(path, allowed_touch=touches)
        path, w = _normalize_winding(chart, path)
        paths[(kind, index)] = path
        windings[(kind, index)] = w

    for i in range(1, n + 1):
        register(SeedKind.ALPHA, i, _hole_ring(i))
        aliases[(SeedKind.INNER_BOUNDARY, i)] = (SeedKind.ALPHA, i)
    aliases[(SeedKind.GAMMA, 1)] = (SeedKind.ALPHA, 1)
    for k in range(2, n + 1):
        register(SeedKind.GAMMA, k, _enclosing_box(k))
    for i, j in itertools.combinations(range(1, min(n, _MAX_PAIR) + 1), 2):
        register(SeedKind.PAIR, (i, j), _pair_curve(i, j))
        register(SeedKind.INTERVAL, (i, j), _interval_box(i, j))
    register(SeedKind.OUTER_BOUNDARY, 1, _outer_parallel(chart))

    probes = [_probe_ray(chart, i) for i in range(1, n + 1)]
    for i, probe in enumerate(probes, start=1):
        chart.validate_path(probe)
        if chart.develop(probe) != (i,):
            raise ModelError(f"ray probe {i} develops wrongly")

    arcs, touches = [], {}
    for i in range(1, n + 1):
        arc, end = _arc_row(chart, i)
        chart.validate_path(arc, allowed_touch=(end,))
        arcs.append(arc)
        touches[len(arcs) - 1] = end

    checks = {}
    for i in range(1, n + 1):
        checks[f"hole{i}"] = _check_row(chart, i)
    outer_check = _check_outer(chart)
    checks["outer"] = outer_check
    for c in checks.values():
        chart.validate_path(c)
    outer_word = _word(chart.develop(outer_check))
    if outer_word != _word(tuple(range(1, n + 1))):
        raise ModelError("outer boundary word is not the ordered product of hole letters")

    # boundary factorization: outer = ordered product of the based hole words
    hole_words = tuple(_word((i,)) for i in range(1, n + 1))
    product = Word()
    for hw in hole_words:
        product = product * hw
    if product != outer_word:
        raise ModelError("planar boundary factorization failed")
    for i in range(1, n + 1):
        got = _word(chart.develop(checks[f"hole{i}"]))
        if not _cyclically_equal(got, hole_words[i - 1], allow_inverse=True):
            raise ModelError(f"hole {i} check loop does not match its factor word")

    gram = _gram_matrix(n, n, None)
    basis = tuple(tuple(1 if r == c else 0 for r in range(n)) for c in range(n))

    classes = {key: _chart_class(chart, path) for key, path in paths.items()}
    sample = []
    keys = sorted(paths.keys(), key=repr)
    for ka, kb in itertools.combinations(keys, 2):
        sample.append((ka, kb, paths[ka], paths[kb]))
    _verify_pairing(gram, chart, sample, classes)

    return SurfaceModel(
        genus=0,
        chart=chart,
        neck=None,
        run_length=n,
        bands=0,
        boundary_names=tuple(f"hole{i}" for i in range(1, n + 1)),
        paths=paths,
        aliases=aliases,
        windings=windings,
        probes=probes,
        arcs=arcs,
        arc_touches=touches,
        checks=checks,
        outer_word=outer_word,
        hole_words=hole_words,
        handle_words=None,
        basis_cols=basis,
        gram_chart=gram,
    )


# -- fiber builder -----------------------------------------------------------------


def build_fiber(graph: ResolutionGraph) -> SurfaceModel:
    """The genus-1 fiber surface for a supported 3-legged plumbing graph."""
    run, neck, bands = graph.fiber_shape()
    if run > _MAX_RUN or bands > _MAX_BANDS:
        raise ValueError("graph parameters above the supported template range")
    chart = Chart(run, gate_square=neck, gate_count=bands)
    rank = chart.rank()

    paths: dict = {}
    aliases: dict = {}
    windings: dict = {}

    def register(kind: str, index, path: Path, touches=(), winding_one: bool = True):
        chart.validate_path(path, allowed_touch=touches)
        if winding_one:
            path, w = _normalize_winding(chart, path)
        else:
            w = chart.winding(path)
            if w < 0:
                path = path.reversed()
                w = chart.winding(path)
        paths[(kind, index)] = path
        windings[(kind, index)] = w

    for i in range(1, run + 1):
        register(SeedKind.ALPHA, i, _hole_ring(i))
    aliases[(SeedKind.GAMMA, 1)] = (SeedKind.ALPHA, 1)
    for k in range(2, run + 1):
        register(SeedKind.GAMMA, k, _enclosing_box(k))
    aliases[(SeedKind.GAMMA_NECK, 1)] = (SeedKind.GAMMA, neck)
    aliases[(SeedKind.GAMMA_NECK, neck)] = (SeedKind.GAMMA, neck)

    register(SeedKind.BETA, 1, _gap_loop(chart, 1, Fr(2, 3), _LANE_BETA - Fr(1, 2500)))
    for j in range(2, bands + 1):
        register(
            SeedKind.BETA,
            j,
            _band_loop(chart, j, j - 1, Fr(2, 3), Fr(1, 3), _LANE_BETA - Fr(j, 2500)),
        )
    aliases[(SeedKind.DELTA, 1)] = (SeedKind.BETA, 1)
    for j in range(2, bands + 1):
        register(SeedKind.DELTA, j, _gap_loop(chart, j, Fr(2, 5), _LANE_DELTA - Fr(j, 2500)))
    if bands >= 2:
        register(
            SeedKind.HANDLE_BETA,
            1,
            _band_loop(chart, bands, 1, Fr(8, 15), Fr(5, 12), _LANE_HANDLE),
        )

    # inner boundaries in layout order: rows west of the neck, the merged
    # boundary, the slots in descending order, rows east of the neck
    boundary_names: list = []
    arc_specs: list = []
    for i in range(1, neck):
        boundary_names.append(f"row{i}")
        aliases[(SeedKind.INNER_BOUNDARY, len(boundary_names))] = (SeedKind.ALPHA, i)
        arc_specs.append(("row", i))
    boundary_names.append("merged")
    merged_pos = len(boundary_names)
    register(SeedKind.INNER_BOUNDARY, merged_pos, _merged_parallel(chart), winding_one=False)
    arc_specs.append(("merged", 0))
    for m in range(bands - 1, 0, -1):
        boundary_names.append(f"slot{m}")
        register(
            SeedKind.INNER_BOUNDARY,
            len(boundary_names),
            _band_loop(chart, m, m + 1, Fr(1, 20), Fr(19, 20), _LANE_SLOTPAR - Fr(m, 2500)),
        )
        arc_specs.append(("slot", m))
    for i in range(neck + 2, run + 1):
        boundary_names.append(f"row{i}")
        aliases[(SeedKind.INNER_BOUNDARY, len(boundary_names))] = (SeedKind.ALPHA, i)
        arc_specs.append(("row", i))

    register(SeedKind.OUTER_BOUNDARY, 1, _outer_parallel(chart))

    # drawing-independence: the merged parallel redrawn on displaced lanes
    # must report the same winding
    redraw = _merged_parallel(chart, jitter=Fr(1, 600))
    chart.validate_path(redraw)
    if chart.winding(redraw) != chart.winding(paths[(SeedKind.INNER_BOUNDARY, merged_pos)]):
        raise ModelError("merged boundary parallel winding depends on the drawing")

    probes = [_probe_ray(chart, i) for i in range(1, run + 1)]
    probes += [_probe_gate(chart, j) for j in range(1, bands + 1)]
    for g, probe in enumerate(probes, start=1):
        chart.validate_path(probe)
        if chart.develop(probe) != (g,):
            raise ModelError(f"probe {g} develops wrongly")

    arcs, touches = [], {}
    for kind, idx in arc_specs:
        if kind == "row":
            arc, end = _arc_row(chart, idx)
        elif kind == "slot":
            arc, end = _arc_slot(chart, idx)
        else:
            arc, end = _arc_merged(chart)
        chart.validate_path(arc, allowed_touch=(end,))
        arcs.append(arc)
        touches[len(arcs) - 1] = end

    checks = {}
    outer_check = _check_outer(chart)
    checks["outer"] = outer_check
    chart.validate_path(outer_check)
    outer_word = _word(chart.develop(outer_check))
    if outer_word != _word(tuple(range(1, run + 1))):
        raise ModelError("outer boundary word is not the ordered product of ray letters")

    # boundary factorization blocks, written in the free group on the chart
    # letters: the merged word, the slot words, and the two handle words
    # multiply to r_N r_{N+1} with the commutator at the end of the stack
    rl = [_word((i,)) for i in range(1, run + 1)]
    tl = [_word((run + j,)) for j in range(1, bands + 1)]
    r_n, r_n1 = rl[neck - 1], rl[neck]
    merged_word = tl[0].inv() * r_n * tl[bands - 1] * r_n1
    slot_words = {m: r_n1.inv() * tl[m].inv() * tl[m - 1] * r_n1 for m in range(1, bands)}
    u_word = r_n1.inv() * tl[0].inv() * r_n1
    v_word = r_n1.inv() * r_n.inv() * r_n1
    commutator = u_word * v_word * u_word.inv() * v_word.inv()
    block = merged_word
    for m in range(bands - 1, 0, -1):
        block = block * slot_words[m]
    block = block * commutator
    if block != r_n * r_n1:
        raise ModelError("handle block identity failed")

    hole_words_list = []
    for name in boundary_names:
        if name.startswith("row"):
            hole_words_list.append(rl[int(name[3:]) - 1])
        elif name == "merged":
            hole_words_list.append(merged_word)
        else:
            hole_words_list.append(slot_words[int(name[4:])])
    hole_words = tuple(hole_words_list)

    product = Word()
    inserted = False
    for name, hw in zip(boundary_names, hole_words):
        product = product * hw
        if name == "slot1" or (name == "merged" and bands == 1):
            product = product * commutator
            inserted = True
    if not inserted:
        raise ModelError("handle commutator was never placed in the factorization")
    if product != outer_word:
        raise ModelError("fiber boundary factorization failed")

    # certification: each inner boundary's check loop develops to a cyclic
    # rotation of its factor word
    for pos, name in enumerate(boundary_names, start=1):
        if name.startswith("row"):
            check = _check_row(chart, int(name[3:]))
        elif name == "merged":
            check = _check_merged(chart)
        else:
            check = _check_slot(chart, int(name[4:]))
        chart.validate_path(check)
        checks[name] = check
        got = _word(chart.develop(check))
        if not _cyclically_equal(got, hole_words[pos - 1], allow_inverse=True):
            raise ModelError(f"boundary {name} check loop does not match its factor word")

    gram = _gram_matrix(rank, run, neck)

    # public basis columns: hole classes in layout order, then the handle
    # pair ordered so it pairs to +1
    def clsvec(word: Word) -> tuple:
        return word.exponent_sums(rank)

    basis_cols = tuple(clsvec(w) for w in hole_words) + (clsvec(u_word), clsvec(v_word))
    holes_count = len(boundary_names)
    probe_form = _conjugate_form(gram, basis_cols)
    if probe_form[holes_count][holes_count + 1] == -1:
        basis_cols = basis_cols[:holes_count] + (clsvec(v_word), clsvec(u_word))
        probe_form = _conjugate_form(gram, basis_cols)
    for a in range(holes_count + 2):
        for b in range(holes_count + 2):
            expected = 0
            if (a, b) == (holes_count, holes_count + 1):
                expected = 1
            elif (a, b) == (holes_count + 1, holes_count):
                expected = -1
            if probe_form[a][b] != expected:
                raise ModelError("public pairing is not the canonical form")

    classes = {key: _chart_class(chart, path) for key, path in paths.items()}

    def pick(kind: str, index):
        key = (kind, index)
        seen = set()
        while key in aliases:
            if key in seen:
                raise ModelError(f"alias cycle at {key}")
            seen.add(key)
            key = aliases[key]
        return key

    sample_keys = set()
    ring_keys = [(SeedKind.ALPHA, i) for i in range(1, run + 1)]
    ring_keys += [(SeedKind.GAMMA, k) for k in range(2, run + 1)]
    for ka, kb in itertools.combinations(ring_keys, 2):
        sample_keys.add((ka, kb))
    cluster = [pick(SeedKind.BETA, j) for j in range(1, bands + 1)]
    cluster += [pick(SeedKind.DELTA, j) for j in range(1, bands + 1)]
    cluster += [(SeedKind.INNER_BOUNDARY, merged_pos)]
    cluster += [
        (SeedKind.INNER_BOUNDARY, merged_pos + k) for k in range(1, bands)
    ]
    if bands >= 2:
        cluster.append((SeedKind.HANDLE_BETA, 1))
    cluster = sorted(set(cluster), key=repr)
    near = [pick(SeedKind.ALPHA, neck), pick(SeedKind.ALPHA, neck + 1), pick(SeedKind.GAMMA, neck)]
    near.append(pick(SeedKind.GAMMA, neck + 1))
    near.append((SeedKind.OUTER_BOUNDARY, 1))
    if neck >= 2:
        near.append(pick(SeedKind.ALPHA, neck - 1))
    if neck + 2 <= run:
        near.append(pick(SeedKind.GAMMA, neck + 2))
    for ka, kb in itertools.combinations(cluster, 2):
        sample_keys.add((ka, kb))
    for ka in cluster:
        for kb in near:
            if ka != kb:
                sample_keys.add((ka, kb))
    sample = [(ka, kb, paths[ka], paths[kb]) for ka, kb in sorted(sample_keys, key=repr)]
    _verify_pairing(gram, chart, sample, classes)

    return SurfaceModel(
        genus=1,
        chart=chart,
        neck=neck,
        run_length=run,
        bands=bands,
        boundary_names=tuple(boundary_names),
        paths=paths,
        aliases=aliases,
        windings=windings,
        probes=probes,
        arcs=arcs,
        arc_touches=touches,
        checks=checks,
        outer_word=outer_word,
        hole_words=hole_words,
        handle_words=(u_word, v_word),
        basis_cols=basis_cols,
        gram_chart=gram,
    )


# -- module-level operations -------------------------------------------------------


def _resolve_entry(model: SurfaceModel, ref: CurveRef, evaluate: Optional[Callable]):
    if isinstance(ref, Seed):
        return model.seed(ref), None
    if isinstance(ref, Image):
        if evaluate is None:
            from . import mcgword

            evaluate = lambda word: mcgword.evaluate(model, word)
        return None, (evaluate(ref.prefix), ref.base)
    raise TypeError(f"not a curve reference: {ref!r}")


def seed_twist(model: SurfaceModel, ref: CurveRef, evaluate: Optional[Callable] = None) -> MarkedClass:
    """The marked class of the right-handed Dehn twist along ``ref``."""
    entry, image = _resolve_entry(model, ref, evaluate)
    if entry is not None:
        return entry.twist
    cls, base = image
    inner = seed_twist(model, base, evaluate)
    from .fatgroup import mclass_compose

    return mclass_compose(mclass_compose(cls, inner), cls.inverse())


def homology_class(model: SurfaceModel, ref: CurveRef, evaluate: Optional[Callable] = None) -> tuple:
    """The curve's class in the public homology basis."""
    entry, image = _resolve_entry(model, ref, evaluate)
    if entry is not None:
        return entry.h1_class
    cls, base = image
    from .fatgroup import mclass_abelianize

    mat_chart = mclass_abelianize(cls)
    base_vec = homology_class(model, base, evaluate)
    chart_vec = _mat_vec(model._basis, base_vec)
    moved = _mat_vec(mat_chart, chart_vec)
    return _mat_vec(model._basis_inv, moved)


def pairing(model: SurfaceModel, x: Iterable[int], y: Iterable[int]) -> int:
    return model.pairing(x, y)


def winding_number(model: SurfaceModel, ref: CurveRef, evaluate: Optional[Callable] = None) -> int:
    """Tangent winding of the drawn representative; twist seeds normalize to +1.

    Image curves use the twist calculus: a right-handed twist along ``c``
    adds ``<x, c> w(c)`` to the winding of ``x``.
    """
    entry, _ = _resolve_entry(model, ref, evaluate)
    if entry is not None:
        return entry.winding
    from . import mcgword

    return mcgword.image_winding(model, ref, evaluate)
