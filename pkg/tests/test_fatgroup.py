"""Unit and property tests for words, automorphisms, and marked classes."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab.fatgroup import (
    FreeAut,
    MarkedClass,
    Word,
    mclass_abelianize,
    mclass_compose,
    mclass_equal,
    word_reduce,
)

RANK = 4

letters_st = st.lists(
    st.integers(min_value=-RANK, max_value=RANK).filter(lambda s: s != 0),
    max_size=40,
)
word_st = letters_st.map(lambda ls: Word(tuple(ls)))


def elem_auts(rank: int) -> list[FreeAut]:
    """Nielsen generators with hand-written inverses."""
    ident = tuple(Word((i,)) for i in range(1, rank + 1))
    auts: list[FreeAut] = []
    for i in range(rank):
        imgs = list(ident)
        imgs[i] = Word((-(i + 1),))
        auts.append(FreeAut(rank, tuple(imgs), tuple(imgs)))
        for j in range(rank):
            if i == j:
                continue
            imgs = list(ident)
            imgs[i] = Word((i + 1, j + 1))
            inv = list(ident)
            inv[i] = Word((i + 1, -(j + 1)))
            auts.append(FreeAut(rank, tuple(imgs), tuple(inv)))
    return auts


ELEMS = elem_auts(RANK)


def aut_from_indices(indices: list[int]) -> FreeAut:
    acc = FreeAut.identity(RANK)
    for k in indices:
        acc = acc.compose(ELEMS[k % len(ELEMS)])
    return acc


aut_st = st.lists(st.integers(min_value=0, max_value=len(ELEMS) - 1), max_size=8).map(
    aut_from_indices
)


def mat_mul(a, b):
    n = len(a)
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)) for i in range(n)
    )


def mclass_from(aut: FreeAut, prefix_lists: list[list[int]]) -> MarkedClass:
    return MarkedClass(aut, tuple(Word(tuple(ls)) for ls in prefix_lists))


mclass_st = st.builds(mclass_from, aut_st, st.lists(letters_st, min_size=2, max_size=2))


class TestWord:
    def test_constructor_reduces(self):
        assert Word((1, -1)).letters == ()
        assert Word((1, 2, -2, -1, 3)).letters == (3,)
        assert Word((1, 2, 3)).letters == (1, 2, 3)

    def test_gen_and_pairs(self):
        w = Word.gen(3, -1) * Word.gen(1)
        assert w.letters == (-3, 1)
        assert w.pairs() == ((3, -1), (1, 1))
        assert Word.from_pairs(w.pairs()) == w

    def test_gen_validation(self):
        with pytest.raises(ValueError):
            Word.gen(0)
        with pytest.raises(ValueError):
            Word.gen(1, 2)

    def test_mul_and_inv(self):
        u = Word((1, 2))
        v = Word((-2, 3))
        assert (u * v).letters == (1, 3)
        assert u.inv().letters == (-2, -1)
        assert (u * u.inv()).is_empty()

    def test_pow(self):
        w = Word((1, 2))
        assert (w**3).letters == (1, 2, 1, 2, 1, 2)
        assert (w**-2) == (w.inv()) ** 2
        assert (w**0).is_empty()

    def test_conj(self):
        w = Word((2,))
        u = Word((1,))
        assert w.conj(u).letters == (1, 2, -1)

    def test_exponent_sums(self):
        w = Word((1, 2, -1, 2, 3, -3, 1))
        assert w.exponent_sums(4) == (1, 2, 0, 0)

    @given(letters_st)
    def test_reduction_idempotent(self, letters):
        w = Word(tuple(letters))
        assert Word(w.letters) == w
        ls = w.letters
        assert all(ls[i] != -ls[i + 1] for i in range(len(ls) - 1))

    @given(word_st, word_st, word_st)
    def test_associative(self, u, v, w):
        assert (u * v) * w == u * (v * w)

    @given(word_st)
    def test_inverse_cancels(self, w):
        assert (w * w.inv()).is_empty()
        assert (w.inv() * w).is_empty()
        assert w.inv().inv() == w

    @given(word_st, word_st)
    def test_exponent_sums_additive(self, u, v):
        su = u.exponent_sums(RANK)
        sv = v.exponent_sums(RANK)
        assert (u * v).exponent_sums(RANK) == tuple(a + b for a, b in zip(su, sv))


class TestWordReduce:
    def test_accepts_signed_ints(self):
        assert word_reduce([1, -1, 2]).letters == (2,)

    def test_accepts_pairs(self):
        assert word_reduce([(1, 1), (1, -1), (2, 1)]).letters == (2,)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            word_reduce([0])

    def test_rejects_bad_sign(self):
        with pytest.raises(ValueError):
            word_reduce([(1, 2)])

    def test_rejects_out_of_alphabet(self):
        with pytest.raises(ValueError):
            word_reduce([5], alphabet_size=4)
        assert word_reduce([4], alphabet_size=4).letters == (4,)

    def test_rejects_garbage(self):
        with pytest.raises(ValueError):
            word_reduce(["x"])  # type: ignore[list-item]


class TestFreeAut:
    def test_identity(self):
        e = FreeAut.identity(3)
        assert e.is_identity()
        w = Word((1, -3, 2))
        assert e.apply(w) == w
        assert e.apply_inverse(w) == w

    def test_rank_validation(self):
        with pytest.raises(ValueError):
            FreeAut(2, (Word((1,)),), (Word((1,)), Word((2,))))

    @given(aut_st, word_st, word_st)
    def test_homomorphism(self, f, u, v):
        assert f.apply(u * v) == f.apply(u) * f.apply(v)
        assert f.apply(u.inv()) == f.apply(u).inv()

    @given(aut_st)
    def test_stored_inverse_correct(self, f):
        assert f.check_inverse()
        assert f.compose(f.inverse()).is_identity()
        assert f.inverse().compose(f).is_identity()

    @given(aut_st, aut_st, word_st)
    def test_compose_action(self, f, g, w):
        assert f.compose(g).apply(w) == f.apply(g.apply(w))

    @given(aut_st, aut_st, aut_st)
    def test_compose_associative(self, f, g, h):
        lhs = f.compose(g).compose(h)
        rhs = f.compose(g.compose(h))
        assert lhs == rhs

    @settings(max_examples=30)
    @given(aut_st, aut_st)
    def test_abelianization_multiplicative(self, f, g):
        assert f.compose(g).abelianized() == mat_mul(f.abelianized(), g.abelianized())

    def test_abelianization_column_convention(self):
        # rank 2, x1 -> x1 x2: column 0 must be (1, 1)
        f = FreeAut(
            2,
            (Word((1, 2)), Word((2,))),
            (Word((1, -2)), Word((2,))),
        )
        assert f.abelianized() == ((1, 0), (1, 1))


class TestMarkedClass:
    def test_identity(self):
        e = MarkedClass.identity(3, 2)
        assert e.is_identity()
        assert e.arcs == 2
        assert mclass_compose(e, e).is_identity()

    def test_prefixes_distinguish_boundary_twists(self):
        # identical trivial action, different arc prefixes: unequal classes
        a = MarkedClass(FreeAut.identity(2), (Word((1,)), Word()))
        b = MarkedClass.identity(2, 2)
        assert not mclass_equal(a, b)
        assert mclass_equal(a, a)

    def test_arc_mismatch_rejected(self):
        a = MarkedClass.identity(2, 1)
        b = MarkedClass.identity(2, 2)
        with pytest.raises(ValueError):
            mclass_compose(a, b)

    @given(mclass_st, mclass_st, mclass_st)
    def test_compose_associative(self, f, g, h):
        assert mclass_equal(
            mclass_compose(mclass_compose(f, g), h),
            mclass_compose(f, mclass_compose(g, h)),
        )

    @given(mclass_st)
    def test_inverse(self, f):
        assert mclass_compose(f, f.inverse()).is_identity()
        assert mclass_compose(f.inverse(), f).is_identity()
        assert mclass_equal(f.inverse().inverse(), f)

    @given(mclass_st, mclass_st)
    def test_inverse_antihomomorphism(self, f, g):
        assert mclass_equal(
            mclass_compose(f, g).inverse(),
            mclass_compose(g.inverse(), f.inverse()),
        )

    def test_compose_prefix_rule(self):
        # f with x1 -> x1 x2 and prefix x1; g trivial with prefix x2:
        # prefix of f o g must be f(x2) * x1 = x2 x1
        f_aut = FreeAut(
            2,
            (Word((1, 2)), Word((2,))),
            (Word((1, -2)), Word((2,))),
        )
        f = MarkedClass(f_aut, (Word((1,)),))
        g = MarkedClass(FreeAut.identity(2), (Word((2,)),))
        fg = mclass_compose(f, g)
        assert fg.prefixes == (Word((2, 1)),)

    @given(mclass_st, st.integers(min_value=-4, max_value=4))
    def test_power_matches_iteration(self, f, n):
        acc = MarkedClass.identity(f.rank, f.arcs)
        step = f if n >= 0 else f.inverse()
        for _ in range(abs(n)):
            acc = mclass_compose(acc, step)
        assert mclass_equal(f.power(n), acc)

    @given(mclass_st, mclass_st)
    def test_conjugate(self, f, g):
        assert mclass_equal(
            f.conjugate(g),
            mclass_compose(mclass_compose(g, f), g.inverse()),
        )

    @settings(max_examples=30)
    @given(mclass_st, mclass_st)
    def test_abelianize_multiplicative(self, f, g):
        assert mclass_abelianize(mclass_compose(f, g)) == mat_mul(
            mclass_abelianize(f), mclass_abelianize(g)
        )
