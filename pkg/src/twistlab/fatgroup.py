"""Free-group words, automorphisms, and marked mapping classes.

A compact surface with nonempty boundary deformation-retracts onto a wedge of
circles, so its fundamental group is free and a mapping class is faithfully
recorded by the induced automorphism together with a little extra boundary
bookkeeping.  The extra bookkeeping matters: a Dehn twist along a curve
parallel to a boundary component induces an inner (here even trivial-looking)
automorphism, yet is nontrivial in the mapping class group rel boundary.  We
therefore mark one embedded arc from the basepoint to each inner boundary
circle and store, per arc, the loop that the mapping class inserts in front
of it.  Automorphism plus arc prefixes determines the class rel boundary.

Conventions used throughout the package:

* Generators are numbered ``1..rank``; a word is a tuple of nonzero signed
  integers, ``k`` meaning the generator ``x_k`` and ``-k`` its inverse.
* Words are always stored freely reduced.
* ``compose(f, g)`` and ``mclass_compose(f, g)`` mean *g first, then f*,
  matching function composition ``f o g``.
* Abelianizations are integer matrices in the column convention: column ``j``
  is the exponent vector of the image of ``x_{j+1}``, so that
  ``ab(f o g) == ab(f) @ ab(g)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

__all__ = [
    "Word",
    "word_reduce",
    "FreeAut",
    "MarkedClass",
    "mclass_compose",
    "mclass_equal",
    "mclass_abelianize",
]


def _is_reduced(letters: Sequence[int]) -> bool:
    return all(letters[i] != -letters[i + 1] for i in range(len(letters) - 1))


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a letter sequence with a single stack pass."""
    out: list[int] = []
    push = out.append
    pop = out.pop
    for s in letters:
        if out and out[-1] == -s:
            pop()
        else:
            push(s)
    return tuple(out)


def _inv_tuple(letters: Sequence[int]) -> tuple[int, ...]:
    return tuple(-s for s in reversed(letters))


@dataclass(frozen=True, slots=True)
class Word:
    """A freely reduced word in a free group.

    The constructor reduces its input, so every held instance is reduced and
    equality of instances is equality in the free group.
    """

    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        letters = self.letters
        if not isinstance(letters, tuple):
            object.__setattr__(self, "letters", tuple(letters))
            letters = self.letters
        if not _is_reduced(letters):
            object.__setattr__(self, "letters", _reduce(letters))

    @classmethod
    def gen(cls, index: int, sign: int = 1) -> "Word":
        if index < 1:
            raise ValueError(f"generator index must be >= 1, got {index}")
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {sign}")
        return cls((index * sign,))

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Word":
        letters = []
        for index, sign in pairs:
            if index < 1:
                raise ValueError(f"generator index must be >= 1, got {index}")
            if sign not in (1, -1):
                raise ValueError(f"sign must be +1 or -1, got {sign}")
            letters.append(index * sign)
        return cls(tuple(letters))

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """The word as ``(index, sign)`` pairs."""
        return tuple((abs(s), 1 if s > 0 else -1) for s in self.letters)

    def __mul__(self, other: "Word") -> "Word":
        if not isinstance(other, Word):
            return NotImplemented
        return Word(_reduce(self.letters + other.letters))

    def inv(self) -> "Word":
        return Word(_inv_tuple(self.letters))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return self.inv() ** (-n)
        acc = Word()
        for _ in range(n):
            acc = acc * self
        return acc

    def conj(self, by: "Word") -> "Word":
        """``by * self * by^-1``."""
        return Word(_reduce(by.letters + self.letters + _inv_tuple(by.letters)))

    def exponent_sums(self, rank: int) -> tuple[int, ...]:
        sums = [0] * rank
        for s in self.letters:
            sums[abs(s) - 1] += 1 if s > 0 else -1
        return tuple(sums)

    def max_index(self) -> int:
        return max((abs(s) for s in self.letters), default=0)

    def is_empty(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __repr__(self) -> str:
        if not self.letters:
            return "Word()"
        body = " ".join(f"x{s}" if s > 0 else f"x{-s}^-1" for s in self.letters)
        return f"Word<{body}>"


def word_reduce(
    raw: Iterable[int] | Iterable[tuple[int, int]],
    alphabet_size: int | None = None,
) -> Word:
    """Build a reduced :class:`Word` from loose input.

    Accepts either signed integers or ``(index, sign)`` pairs and validates
    them, optionally against an alphabet size.  This is the lenient public
    entry point; internal code constructs :class:`Word` directly.
    """
    letters: list[int] = []
    for item in raw:
        if isinstance(item, tuple):
            index, sign = item
            if sign not in (1, -1):
                raise ValueError(f"sign must be +1 or -1, got {sign}")
            letter = index * sign
        elif isinstance(item, int) and not isinstance(item, bool):
            letter = item
        else:
            raise ValueError(f"letter must be a signed int or (index, sign) pair, got {item!r}")
        index = abs(letter)
        if index < 1:
            raise ValueError(f"generator index must be >= 1, got {letter!r}")
        if alphabet_size is not None and index > alphabet_size:
            raise ValueError(f"generator index {index} exceeds alphabet size {alphabet_size}")
        letters.append(letter)
    return Word(tuple(letters))


def _identity_images(rank: int) -> tuple[Word, ...]:
    return tuple(Word((i,)) for i in range(1, rank + 1))


@dataclass(frozen=True, slots=True)
class FreeAut:
    """An automorphism of the free group of the given rank.

    Both the generator images and the inverse's generator images are stored:
    free-group automorphisms admit no general mechanical inversion, so every
    constructor must supply the inverse and every operation transports it.
    """

    rank: int
    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.rank or len(self.inverse_images) != self.rank:
            raise ValueError(
                f"rank {self.rank} needs {self.rank} images and inverse images, "
                f"got {len(self.images)} and {len(self.inverse_images)}"
            )

    @classmethod
    def identity(cls, rank: int) -> "FreeAut":
        images = _identity_images(rank)
        return cls(rank, images, images)

    def is_identity(self) -> bool:
        return self.images == _identity_images(self.rank)

    def _apply_images(self, images: tuple[Word, ...], w: Word) -> Word:
        buf: list[int] = []
        for s in w.letters:
            img = images[abs(s) - 1].letters
            buf.extend(img if s > 0 else _inv_tuple(img))
        return Word(_reduce(buf))

    def apply(self, w: Word) -> Word:
        return self._apply_images(self.images, w)

    def apply_inverse(self, w: Word) -> Word:
        return self._apply_images(self.inverse_images, w)

    def compose(self, other: "FreeAut") -> "FreeAut":
        """``self o other`` (other first)."""
        if self.rank != other.rank:
            raise ValueError(f"rank mismatch: {self.rank} vs {other.rank}")
        images = tuple(self.apply(w) for w in other.images)
        inverse_images = tuple(other.apply_inverse(w) for w in self.inverse_images)
        return FreeAut(self.rank, images, inverse_images)

    def inverse(self) -> "FreeAut":
        return FreeAut(self.rank, self.inverse_images, self.images)

    def abelianized(self) -> tuple[tuple[int, ...], ...]:
        """Integer matrix rows; column j is the exponent vector of image j."""
        cols = [w.exponent_sums(self.rank) for w in self.images]
        return tuple(tuple(cols[j][i] for j in range(self.rank)) for i in range(self.rank))

    def check_inverse(self) -> bool:
        """Verify the stored inverse both ways.  Test and build-time use."""
        gens = _identity_images(self.rank)
        return all(
            self.apply(self.inverse_images[i]) == gens[i]
            and self.apply_inverse(self.images[i]) == gens[i]
            for i in range(self.rank)
        )


@dataclass(frozen=True, slots=True)
class MarkedClass:
    """A mapping class rel boundary: free-group action plus arc prefixes.

    ``prefixes[j]`` is the loop inserted in front of the marked arc to inner
    boundary ``j``: if ``A_j`` is the arc then the class sends ``A_j`` to
    ``prefixes[j] * A_j`` up to homotopy rel endpoints on the boundary.
    """

    aut: FreeAut
    prefixes: tuple[Word, ...] = field(default=())

    def __post_init__(self) -> None:
        if not isinstance(self.prefixes, tuple):
            object.__setattr__(self, "prefixes", tuple(self.prefixes))

    @classmethod
    def identity(cls, rank: int, arcs: int) -> "MarkedClass":
        return cls(FreeAut.identity(rank), tuple(Word() for _ in range(arcs)))

    @property
    def rank(self) -> int:
        return self.aut.rank

    @property
    def arcs(self) -> int:
        return len(self.prefixes)

    def is_identity(self) -> bool:
        return self.aut.is_identity() and all(p.is_empty() for p in self.prefixes)

    def apply(self, w: Word) -> Word:
        return self.aut.apply(w)

    def compose(self, other: "MarkedClass") -> "MarkedClass":
        """``self o other`` (other first)."""
        if self.arcs != other.arcs:
            raise ValueError(f"arc count mismatch: {self.arcs} vs {other.arcs}")
        aut = self.aut.compose(other.aut)
        prefixes = tuple(
            self.aut.apply(other.prefixes[j]) * self.prefixes[j] for j in range(self.arcs)
        )
        return MarkedClass(aut, prefixes)

    def inverse(self) -> "MarkedClass":
        aut = self.aut.inverse()
        prefixes = tuple(self.aut.apply_inverse(p).inv() for p in self.prefixes)
        return MarkedClass(aut, prefixes)

    def power(self, n: int) -> "MarkedClass":
        if n < 0:
            return self.inverse().power(-n)
        acc = MarkedClass.identity(self.rank, self.arcs)
        base = self
        # square-and-multiply; twist powers appear in every family word
        while n:
            if n & 1:
                acc = acc.compose(base)
            n >>= 1
            if n:
                base = base.compose(base)
        return acc

    def conjugate(self, by: "MarkedClass") -> "MarkedClass":
        """``by o self o by^-1``."""
        return by.compose(self).compose(by.inverse())

    def abelianized(self) -> tuple[tuple[int, ...], ...]:
        return self.aut.abelianized()


def mclass_compose(f: MarkedClass, g: MarkedClass) -> MarkedClass:
    """Compose mapping classes, ``g`` acting first."""
    return f.compose(g)


def mclass_equal(f: MarkedClass, g: MarkedClass) -> bool:
    """Exact equality rel boundary: same action and same arc prefixes."""
    return f.aut.images == g.aut.images and f.prefixes == g.prefixes


def mclass_abelianize(f: MarkedClass) -> tuple[tuple[int, ...], ...]:
    """The induced integer matrix on first homology (column convention)."""
    return f.abelianized()
