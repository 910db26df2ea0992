"""Twist-word calculus: factorizations, elementary moves, and relations.

A twist word is an ordered sequence of (curve, exponent) factors over one
surface model.  It evaluates to the composite of the factor twists, the
rightmost factor applied first.  All word-transforming operations preserve
that composite exactly, and relation instances are usable for substitution
only after an evaluation check in the target surface.

Textual syntax, round-tripped by ``parse_word``/``format_word``:

    word    := factor (' ' factor)*
    factor  := curve power?
    power   := '^' nonzero-integer        (expanded to unit exponents)
    curve   := seed | image
    seed    := kind index | kind i '.' j  (two-index kinds use i.j)
    image   := 'I[' word '](' curve ')'

Seed tokens use the kind letters of the surface catalog: ``a3`` is the ring
around hole 3, ``g5`` the box around holes 1..5, ``b2``/``d4`` gate curves,
``n1`` the neck box, ``h1`` the cross-handle curve, ``x1.4``/``v2.5`` the
two-hole and interval curves, ``ib2``/``ob1`` boundary parallels.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import weakref

from .fatgroup import Word, MarkedClass, mclass_abelianize, mclass_compose, mclass_equal
from .surfaces import (
    CurveRef,
    Image,
    ModelError,
    Seed,
    SeedKind,
    SurfaceModel,
    _transvection,
    homology_class,
    seed_twist,
)


class WordError(Exception):
    """Structural misuse of a word operation (bad span, unverified instance)."""


Factor = Tuple[CurveRef, int]


@dataclass(frozen=True)
class TwistWord:
    surface: SurfaceModel
    factors: Tuple[Factor, ...] = ()

    def __post_init__(self):
        for ref, exp in self.factors:
            if exp not in (1, -1):
                raise ValueError(f"factor exponent must be +1 or -1, got {exp}")
            if not isinstance(ref, (Seed, Image)):
                raise TypeError(f"not a curve reference: {ref!r}")

    def __len__(self) -> int:
        return len(self.factors)

    def is_positive(self) -> bool:
        return all(exp == 1 for _, exp in self.factors)

    def inverse(self) -> "TwistWord":
        inv = tuple((ref, -exp) for ref, exp in reversed(self.factors))
        return TwistWord(self.surface, inv)

    def __mul__(self, other: "TwistWord") -> "TwistWord":
        if other.surface is not self.surface:
            raise WordError("cannot concatenate words over different surfaces")
        return TwistWord(self.surface, self.factors + other.factors)


def word(surface: SurfaceModel, factors: Iterable) -> TwistWord:
    """Build a word from (ref, exp) pairs, bare refs, or a syntax string."""
    if isinstance(factors, str):
        return parse_word(surface, factors)
    out = []
    for item in factors:
        if isinstance(item, (Seed, Image)):
            out.append((item, 1))
        else:
            ref, exp = item
            step = 1 if exp > 0 else -1
            for _ in range(abs(exp)):
                out.append((ref, step))
    return TwistWord(surface, tuple(out))


# -- textual syntax --

_KIND_TOKENS = sorted(((kind, kind) for kind in SeedKind.ALL), key=lambda p: -len(p[0]))
_PAIRED_KINDS = (SeedKind.PAIR, SeedKind.INTERVAL)


def _format_ref(ref: CurveRef) -> str:
    if isinstance(ref, Seed):
        if ref.kind in _PAIRED_KINDS:
            i, j = ref.index
            return f"{ref.kind}{i}.{j}"
        return f"{ref.kind}{ref.index}"
    if isinstance(ref, Image):
        if not isinstance(ref.prefix, TwistWord):
            raise WordError(f"image prefix {ref.prefix!r} has no textual form")
        return f"I[{format_word(ref.prefix)}]({_format_ref(ref.base)})"
    raise TypeError(f"not a curve reference: {ref!r}")


def format_word(w: TwistWord) -> str:
    """Render a word; adjacent equal factors compress into a power."""
    parts: List[str] = []
    i, n = 0, len(w.factors)
    while i < n:
        ref, exp = w.factors[i]
        run = 1
        while i + run < n and w.factors[i + run] == (ref, exp):
            run += 1
        token = _format_ref(ref)
        power = exp * run
        if power != 1:
            token += f"^{power}"
        parts.append(token)
        i += run
    return " ".join(parts)


class _Parser:
    def __init__(self, surface: SurfaceModel, text: str):
        self.surface = surface
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ValueError(f"word syntax error at index {self.pos}: {msg}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self):
        while self.peek() == " ":
            self.pos += 1

    def parse_word(self, stop: str = "") -> TwistWord:
        factors: List[Factor] = []
        self.skip_ws()
        while self.pos < len(self.text) and self.peek() != stop:
            ref = self.parse_curve()
            exp = self.parse_power()
            step = 1 if exp > 0 else -1
            factors.extend([(ref, step)] * abs(exp))
            self.skip_ws()
        return TwistWord(self.surface, tuple(factors))

    def parse_curve(self) -> CurveRef:
        if self.text.startswith("I[", self.pos):
            self.pos += 2
            prefix = self.parse_word(stop="]")
            if self.peek() != "]":
                self.error("unterminated image prefix")
            self.pos += 1
            if self.peek() != "(":
                self.error("image needs a (curve) argument")
            self.pos += 1
            base = self.parse_curve()
            if self.peek() != ")":
                self.error("unterminated image argument")
            self.pos += 1
            return Image(prefix=prefix, base=base)
        for token, kind in _KIND_TOKENS:
            if self.text.startswith(token, self.pos):
                rest = self.text[self.pos + len(token):]
                if rest[:1].isdigit():
                    self.pos += len(token)
                    return Seed(kind, self.parse_index(kind))
        self.error("expected a curve token")

    def parse_index(self, kind: str):
        first = self.parse_int()
        if kind in _PAIRED_KINDS:
            if self.peek() != ".":
                self.error(f"kind {kind!r} needs a dotted index pair")
            self.pos += 1
            return (first, self.parse_int())
        return first

    def parse_int(self) -> int:
        start = self.pos
        if self.peek() == "-":
            self.pos += 1
        while self.peek().isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def parse_power(self) -> int:
        if self.peek() != "^":
            return 1
        self.pos += 1
        exp = self.parse_int()
        if exp == 0:
            self.error("zero exponent")
        return exp


def parse_word(surface: SurfaceModel, text: str) -> TwistWord:
    parser = _Parser(surface, text)
    w = parser.parse_word()
    if parser.pos != len(text):
        parser.error("trailing input")
    return w


# -- evaluation --

_EVAL_CACHE: "weakref.WeakKeyDictionary[SurfaceModel, Dict]" = weakref.WeakKeyDictionary()


def evaluate(w, surface: Optional[SurfaceModel] = None) -> MarkedClass:
    """Composite marked class of a word (rightmost factor applied first)."""
    if isinstance(w, MarkedClass):
        return w
    if not isinstance(w, TwistWord):
        raise TypeError(f"not a twist word: {w!r}")
    model = surface or w.surface
    cache = _EVAL_CACHE.setdefault(model, {})
    hit = cache.get(w.factors)
    if hit is not None:
        return hit
    out = MarkedClass.identity(model.rank, model.holes)
    for ref, exp in w.factors:
        t = seed_twist(model, ref, evaluate=lambda prefix: evaluate(prefix, model))
        out = mclass_compose(out, t if exp == 1 else t.inverse())
    cache[w.factors] = out
    return out


def factor_twist(w: TwistWord, i: int) -> MarkedClass:
    """Marked class of the single factor at 0-based position i."""
    ref, exp = w.factors[i]
    t = seed_twist(w.surface, ref, evaluate=lambda p: evaluate(p, w.surface))
    return t if exp == 1 else t.inverse()


def words_equal(a: TwistWord, b: TwistWord) -> bool:
    return mclass_equal(evaluate(a), evaluate(b))


# -- elementary moves --


def _single(w: TwistWord, i: int, sign: int) -> TwistWord:
    ref, exp = w.factors[i]
    return TwistWord(w.surface, ((ref, sign * exp),))


def hurwitz_move(w: TwistWord, i: int, direction: str = "left") -> TwistWord:
    """Exchange factors i, i+1 (1-based pair index), preserving the product.

    direction "left": t_a t_b -> t_b t_{t_b^-1(a)}  (b moves left unchanged)
    direction "right": t_a t_b -> t_{t_a(b)} t_a    (a moves right unchanged)
    """
    if not 1 <= i < len(w.factors):
        raise IndexError(f"pair position {i} out of range 1..{len(w.factors) - 1}")
    a, b = w.factors[i - 1], w.factors[i]
    if direction == "left":
        conj = _single(w, i, -1)
        pair = (b, (Image(prefix=conj, base=a[0]), a[1]))
    elif direction == "right":
        conj = _single(w, i - 1, 1)
        pair = ((Image(prefix=conj, base=b[0]), b[1]), a)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return TwistWord(w.surface, w.factors[: i - 1] + pair + w.factors[i + 1 :])


def slide(w: TwistWord, src: int, dst: int) -> TwistWord:
    """Move the factor at 0-based src to dst by repeated Hurwitz moves.

    The moving factor arrives unchanged; each bypassed factor picks up the
    conjugation that keeps the product fixed.
    """
    if not 0 <= src < len(w.factors) or not 0 <= dst < len(w.factors):
        raise IndexError("slide positions out of range")
    while src < dst:
        w = hurwitz_move(w, src + 1, "right")
        src += 1
    while src > dst:
        w = hurwitz_move(w, src, "left")
        src -= 1
    return w


def insert_cancel(w: TwistWord, i: int, ref: CurveRef, order: str = "-+") -> TwistWord:
    """Insert t_c^-1 t_c (order "-+") or t_c t_c^-1 ("+-") at 0-based slot i."""
    if not 0 <= i <= len(w.factors):
        raise IndexError(f"insertion slot {i} out of range 0..{len(w.factors)}")
    if order == "-+":
        pair = ((ref, -1), (ref, 1))
    elif order == "+-":
        pair = ((ref, 1), (ref, -1))
    else:
        raise ValueError(f"order must be '-+' or '+-', got {order!r}")
    seed_twist(w.surface, ref, evaluate=lambda p: evaluate(p, w.surface))
    return TwistWord(w.surface, w.factors[:i] + pair + w.factors[i:])


def delete_cancel(w: TwistWord, i: int) -> TwistWord:
    """Delete the cancelling pair at 0-based positions i, i+1."""
    if not 0 <= i + 1 < len(w.factors):
        raise IndexError(f"pair at {i} out of range")
    (ra, ea), (rb, eb) = w.factors[i], w.factors[i + 1]
    if ea != -eb:
        raise WordError("factors do not have opposite exponents")
    if ra != rb and not mclass_equal(
        factor_twist(w, i), factor_twist(w, i + 1).inverse()
    ):
        raise WordError("factors are not inverse twists")
    return TwistWord(w.surface, w.factors[:i] + w.factors[i + 2 :])


def requal(w: TwistWord, i: int, ref: CurveRef) -> TwistWord:
    """Replace the curve of factor i by a twist-equal reference (verified)."""
    old, exp = w.factors[i]
    new = TwistWord(w.surface, ((ref, exp),))
    if not mclass_equal(factor_twist(w, i), evaluate(new)):
        raise WordError(f"replacement at {i} is not twist-equal")
    return TwistWord(w.surface, w.factors[:i] + ((ref, exp),) + w.factors[i + 1 :])


def global_conjugate(w: TwistWord, ref: CurveRef, sign: int = 1) -> TwistWord:
    """Conjugate every factor by t_ref^sign; evaluates to the conjugated class."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    prefix = TwistWord(w.surface, ((ref, sign),))
    out = tuple((Image(prefix=prefix, base=r), e) for r, e in w.factors)
    return TwistWord(w.surface, out)


# -- homology shadow --


def _ref_class_chart(model: SurfaceModel, ref: CurveRef) -> Tuple[int, ...]:
    if isinstance(ref, Seed):
        return model.seed(ref).loop_word.exponent_sums(model.rank)
    if isinstance(ref, Image):
        if not isinstance(ref.prefix, TwistWord):
            raise WordError("image prefix is not a word; cannot trace homology")
        mat = h1_action(ref.prefix)
        vec = _ref_class_chart(model, ref.base)
        return tuple(
            sum(mat[r][c] * vec[c] for c in range(len(vec))) for r in range(len(vec))
        )
    raise TypeError(f"not a curve reference: {ref!r}")


def h1_action(w: TwistWord) -> Tuple[Tuple[int, ...], ...]:
    """Product of transvections in chart coordinates; a fast necessary check."""
    model = w.surface
    n = model.rank
    out = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
    for ref, exp in w.factors:
        vec = _ref_class_chart(model, ref)
        t = _transvection(model._gram_chart, vec)
        if exp == -1:
            t = tuple(
                tuple((2 if r == c else 0) - t[r][c] for c in range(n))
                for r in range(n)
            )
        out = [
            [sum(out[r][k] * t[k][c] for k in range(n)) for c in range(n)]
            for r in range(n)
        ]
    return tuple(tuple(row) for row in out)


def image_winding(model: SurfaceModel, ref: CurveRef, evaluate_cb=None) -> int:
    """Winding of an image curve via the twist calculus.

    A right-handed twist along s maps a curve x to a curve of winding
    w(x) + <x, s> w(s); prefix factors apply right to left.
    """
    if isinstance(ref, Seed):
        return model.seed(ref).winding
    if not isinstance(ref, Image):
        raise TypeError(f"not a curve reference: {ref!r}")
    if not isinstance(ref.prefix, TwistWord):
        raise WordError("image prefix is not a word; cannot trace winding")
    vec = list(homology_class(model, ref.base, evaluate_cb))
    wind = image_winding(model, ref.base, evaluate_cb)
    for s_ref, exp in reversed(ref.prefix.factors):
        s_vec = homology_class(model, s_ref, evaluate_cb)
        s_wind = image_winding(model, s_ref, evaluate_cb)
        cross = model.pairing(vec, s_vec)
        wind += exp * cross * s_wind
        vec = [v + exp * cross * s for v, s in zip(vec, s_vec)]
    return wind


# -- relations --


@dataclass(frozen=True)
class Relation:
    """An abstract two-sided relation over named curve slots."""

    name: str
    lhs: Tuple[Tuple[str, int], ...]
    rhs: Tuple[Tuple[str, int], ...]

    def slots(self) -> Tuple[str, ...]:
        seen: List[str] = []
        for slot, _ in self.lhs + self.rhs:
            if slot not in seen:
                seen.append(slot)
        return tuple(seen)


@dataclass
class RelationInstance:
    relation: Relation
    surface: SurfaceModel
    assignment: Dict[str, CurveRef]
    _verified: bool = field(default=False, init=False)

    def side_word(self, side: str) -> TwistWord:
        pattern = self.relation.lhs if side == "lhs" else self.relation.rhs
        factors = []
        for slot, exp in pattern:
            if slot not in self.assignment:
                raise WordError(f"assignment is missing slot {slot!r}")
            factors.append((self.assignment[slot], exp))
        return TwistWord(self.surface, tuple(factors))

    @property
    def verified(self) -> bool:
        return self._verified


def verify_relation_instance(inst: RelationInstance) -> dict:
    """Evaluate both sides in the target surface; mark usable on equality."""
    lhs, rhs = inst.side_word("lhs"), inst.side_word("rhs")
    left, right = evaluate(lhs), evaluate(rhs)
    ok = mclass_equal(left, right)
    cert = {
        "relation": inst.relation.name,
        "passed": ok,
        "lhs": format_word(lhs),
        "rhs": format_word(rhs),
    }
    if not ok:
        for gen in range(1, inst.surface.rank + 1):
            probe = Word((gen,))
            if left.aut.apply(probe) != right.aut.apply(probe):
                cert["first_mismatch"] = f"generator {gen}"
                break
        else:
            for pos in range(inst.surface.holes):
                if left.prefixes[pos] != right.prefixes[pos]:
                    cert["first_mismatch"] = f"arc {pos + 1}"
                    break
        raise WordError(f"relation instance failed verification: {cert}")
    inst._verified = True
    return cert


def substitute(
    w: TwistWord, start: int, inst: RelationInstance, direction: str = "forward"
) -> TwistWord:
    """Replace a verified relation side at 0-based start by the other side.

    Span factors must match the incoming side factorwise: equal exponents and
    twist-equal curves (syntactic differences in image form are allowed).
    """
    if not inst.verified:
        raise WordError("relation instance is unverified; run verify_relation_instance")
    if direction == "forward":
        src, dst = inst.side_word("lhs"), inst.side_word("rhs")
    elif direction == "backward":
        src, dst = inst.side_word("rhs"), inst.side_word("lhs")
    else:
        raise ValueError(f"unknown direction {direction!r}")
    stop = start + len(src.factors)
    if not 0 <= start or stop > len(w.factors):
        raise WordError(f"span {start}..{stop} out of range")
    for k, (ref, exp) in enumerate(src.factors):
        have_ref, have_exp = w.factors[start + k]
        if have_exp != exp:
            raise WordError(f"span mismatch at offset {k}: exponent {have_exp} != {exp}")
        if have_ref != ref and not mclass_equal(
            factor_twist(w, start + k), factor_twist(src, k)
        ):
            raise WordError(f"span mismatch at offset {k}: twists differ")
    return TwistWord(w.surface, w.factors[:start] + dst.factors + w.factors[stop:])


# -- relation library --


def braid_relation() -> Relation:
    return Relation(
        name="braid",
        lhs=(("a", 1), ("b", 1), ("a", 1)),
        rhs=(("b", 1), ("a", 1), ("b", 1)),
    )


def lantern_relation() -> Relation:
    return Relation(
        name="lantern",
        lhs=(("a1", 1), ("a2", 1), ("a3", 1), ("cap", 1)),
        rhs=(("x12", 1), ("x13", 1), ("x23", 1)),
    )


def daisy_relation(n: int, center_last: bool = False) -> Relation:
    """n-petal daisy; daisy(2) is the lantern shape.

    Slots: center a1 (multiplicity n-1), petals a2..a_{n+1}, cap; right side
    x2..x_{n+1} (center paired with each petal) then the core around the
    petals.  center_last lists the petal block first, for words that arrive
    with the center powers trailing; both orders evaluate equally because the
    left side's curves are pairwise disjoint.
    """
    if n < 2:
        raise ValueError("daisy needs at least 2 petals")
    center = tuple(("a1", 1) for _ in range(n - 1))
    petals = tuple((f"a{i}", 1) for i in range(2, n + 2))
    cap = (("cap", 1),)
    lhs = petals + cap + center if center_last else center + petals + cap
    rhs = tuple((f"x{i}", 1) for i in range(2, n + 2)) + (("core", 1),)
    tag = "daisy-tail" if center_last else "daisy"
    return Relation(name=f"{tag}({n})", lhs=lhs, rhs=rhs)


def planar_daisy_instance(
    model: SurfaceModel, n: int, base: int = 1, center_last: bool = False
) -> RelationInstance:
    """Canonical daisy assignment on consecutive holes base..base+n."""
    top = base + n
    if top > model.holes:
        raise ModelError(f"daisy span {base}..{top} exceeds the model")
    assignment: Dict[str, CurveRef] = {"a1": Seed(SeedKind.ALPHA, base)}
    for i in range(2, n + 2):
        assignment[f"a{i}"] = Seed(SeedKind.ALPHA, base + i - 1)
        assignment[f"x{i}"] = Seed(SeedKind.PAIR, (base, base + i - 1))
    if base == 1 and top == model.holes:
        assignment["cap"] = Seed(SeedKind.OUTER_BOUNDARY, 1)
    else:
        assignment["cap"] = Seed(SeedKind.INTERVAL, (base, top))
    assignment["core"] = Seed(SeedKind.INTERVAL, (base + 1, top))
    return RelationInstance(
        relation=daisy_relation(n, center_last=center_last),
        surface=model,
        assignment=assignment,
    )


def planar_lantern_instance(model: SurfaceModel, base: int = 1) -> RelationInstance:
    h1, h2, h3 = base, base + 1, base + 2
    if h3 > model.holes:
        raise ModelError(f"lantern span {h1}..{h3} exceeds the model")
    cap: CurveRef
    if h1 == 1 and h3 == model.holes:
        cap = Seed(SeedKind.OUTER_BOUNDARY, 1)
    else:
        cap = Seed(SeedKind.INTERVAL, (h1, h3))
    assignment = {
        "a1": Seed(SeedKind.ALPHA, h1),
        "a2": Seed(SeedKind.ALPHA, h2),
        "a3": Seed(SeedKind.ALPHA, h3),
        "cap": cap,
        "x12": Seed(SeedKind.PAIR, (h1, h2)),
        "x13": Seed(SeedKind.PAIR, (h1, h3)),
        "x23": Seed(SeedKind.PAIR, (h2, h3)),
    }
    return RelationInstance(
        relation=lantern_relation(), surface=model, assignment=assignment
    )
