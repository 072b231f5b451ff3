from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hsstab.errors import MixedContext, NotInRing
from hsstab.exact import (
    PruferResidue,
    ZpContext,
    ZpRational,
    is_prime,
    zq_add,
    zq_depth,
    zq_from_fraction,
    zq_from_value,
    zq_mod1,
    zq_mul,
)

C2 = ZpContext(2)
PRIMES = st.sampled_from([2, 3, 5, 7])
NUMS = st.integers(-(2 ** 64), 2 ** 64)
EXPS = st.integers(0, 40)


def z(n, d=1, ctx=C2):
    return zq_from_fraction(ctx, n, d)


# ---- documented examples -------------------------------------------------------

def test_add_examples():
    one = zq_add(z(1, 2), z(1, 2))
    assert (one.num, one.exp) == (1, 0)
    assert zq_add(z(1, 4), z(1, 4)) == z(1, 2)
    assert zq_add(z(3, 8), z(-3, 8)) == C2.zero


def test_mul_examples():
    assert zq_mul(z(1, 2), z(1, 2)) == z(1, 4)
    assert zq_mul(z(3, 4), C2.zero) == C2.zero
    five = zq_mul(z(5, 8), z(8))
    assert (five.num, five.exp) == (5, 0)


def test_from_fraction_examples():
    q = zq_from_fraction(C2, 1, 4)
    assert (q.num, q.exp) == (1, 2)
    assert zq_from_fraction(C2, 2, 4) == z(1, 2)
    with pytest.raises(NotInRing):
        zq_from_fraction(C2, 1, 3)


def test_mod1_examples():
    assert zq_mod1(z(5, 4)) == PruferResidue(C2, 1, 2)
    assert zq_mod1(z(3)).is_zero()
    # -1/8 + 1 = 7/8
    r = zq_mod1(z(-1, 8))
    assert r.to_fraction() == Fraction(-1, 8) + 1 == Fraction(7, 8)


def test_depth_examples():
    assert zq_depth(z(1, 8)) == 3
    assert zq_depth(z(6)) == 0
    assert zq_depth(C2.zero) == 0


# ---- normalization, context, serialization --------------------------------------

def test_context_rejects_composites():
    for bad in (0, 1, 4, 9, 15):
        with pytest.raises(ValueError):
            ZpContext(bad)
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_normalization_strips_p():
    x = ZpRational(C2, 12, 3)  # 12/8 = 3/2
    assert (x.num, x.exp) == (3, 1)
    assert ZpRational(C2, 0, 5).exp == 0
    assert ZpRational(C2, 3, -2) == z(12)
    # the integer p itself is allowed: exp = 0
    assert (ZpRational(C2, 2, 0).num, ZpRational(C2, 2, 0).exp) == (2, 0)


def test_mixed_context():
    with pytest.raises(MixedContext):
        zq_add(z(1), zq_from_fraction(ZpContext(3), 1, 3))
    with pytest.raises(MixedContext):
        _ = z(1, 2) * ZpRational(ZpContext(3), 1, 1)


def test_text_and_json():
    x = z(-3, 8)
    assert str(x) == "-3/2^3"
    assert x.to_json() == {"num": "-3", "exp": 3}
    big = ZpRational(C2, 3 ** 90, 7)
    assert ZpRational.from_json(C2, big.to_json()) == big


def test_from_value_forms():
    assert zq_from_value(C2, "3/4") == z(3, 4)
    assert zq_from_value(C2, Fraction(-5, 2)) == z(-5, 2)
    assert zq_from_value(C2, 7) == z(7)
    with pytest.raises(NotInRing):
        zq_from_value(C2, "1/6")


def test_inverse_and_units():
    assert z(1, 4).inverse() == z(4)
    assert z(-8).inverse() == z(-1, 8)
    assert not z(3).is_unit()
    with pytest.raises(Exception):
        z(3).inverse()


# ---- properties ----------------------------------------------------------------

@st.composite
def zq_triples(draw):
    ctx = ZpContext(draw(PRIMES))
    return ctx, [ZpRational(ctx, draw(NUMS), draw(EXPS)) for _ in range(3)]


@given(zq_triples())
def test_ring_axioms(data):
    ctx, (x, y, w) = data
    assert (x + y) + w == x + (y + w)
    assert x + y == y + x
    assert (x * y) * w == x * (y * w)
    assert x * y == y * x
    assert x * (y + w) == x * y + x * w
    assert x - x == ctx.zero


@given(zq_triples())
def test_matches_fraction_model(data):
    ctx, (x, y, _) = data
    X, Y = Fraction(x.num, ctx.p ** x.exp), Fraction(y.num, ctx.p ** y.exp)
    assert (x + y).to_fraction() == X + Y
    assert (x * y).to_fraction() == X * Y
    for v in (x, y, x + y, x * y):
        assert v.exp == 0 or v.num % ctx.p != 0
        assert v.num != 0 or v.exp == 0


@given(PRIMES, NUMS, EXPS, st.integers(-1000, 1000))
def test_mod1_integer_shift(p, n, e, k):
    ctx = ZpContext(p)
    x = ZpRational(ctx, n, e)
    r = zq_mod1(x + k)
    assert r == zq_mod1(x)
    assert 0 <= r.num < p ** r.exp or (r.num, r.exp) == (0, 0)
    assert r.to_fraction() == x.to_fraction() % 1


@given(PRIMES, st.integers(-(10 ** 6), 10 ** 6), st.integers(0, 12), st.integers(-50, 50))
def test_from_fraction_round_trip(p, n, e, k):
    ctx = ZpContext(p)
    d = (-1) ** (k % 2) * p ** e
    q = zq_from_fraction(ctx, n * abs(k) if k else n, d)
    assert q.to_fraction() == Fraction(n * abs(k) if k else n, d)


@given(PRIMES, st.integers(1, 10 ** 6), st.integers(2, 50))
def test_not_in_ring_for_foreign_primes(p, n, q):
    ctx = ZpContext(p)
    f = Fraction(n, q)
    d = f.denominator
    while d % p == 0:
        d //= p
    if d == 1:
        zq_from_fraction(ctx, n, q)
    else:
        with pytest.raises(NotInRing):
            zq_from_fraction(ctx, n, q)


def test_prufer_group_laws():
    a, b = PruferResidue(C2, 3, 2), PruferResidue(C2, 5, 3)
    assert (a + b).to_fraction() == (Fraction(3, 4) + Fraction(5, 8)) % 1
    assert (a - a).is_zero()
    assert a.scale(4).is_zero()
    assert PruferResidue(C2, -1, 3) == PruferResidue(C2, 7, 3)
