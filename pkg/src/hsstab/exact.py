"""
Exact arithmetic in Z[1/p] and in the Prüfer quotient Z[1/p]/Z.

Values are stored as ``num / p**exp`` with Python integers, so nothing
overflows.  Every constructor normalizes, which makes equality structural:
``exp > 0`` implies ``p`` does not divide ``num``, and zero is ``0/p^0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import MixedContext, NotInRing


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def p_valuation(n: int, p: int) -> int:
    """Largest v with p**v dividing n (n != 0)."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class ZpContext:
    """Carries the prime shared by every value of a computation."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p!r}")

    def zq(self, num: int, exp: int = 0) -> "ZpRational":
        return ZpRational(self, num, exp)

    def from_fraction(self, n: int, d: int = 1) -> "ZpRational":
        return zq_from_fraction(self, n, d)

    @property
    def zero(self) -> "ZpRational":
        return ZpRational(self, 0, 0)

    @property
    def one(self) -> "ZpRational":
        return ZpRational(self, 1, 0)


def _check_same(x, y):
    if x.ctx.p != y.ctx.p:
        raise MixedContext(f"p={x.ctx.p} mixed with p={y.ctx.p}")


@dataclass(frozen=True)
class ZpRational:
    ctx: ZpContext
    num: int
    exp: int = 0

    def __post_init__(self):
        num, exp, p = int(self.num), int(self.exp), self.ctx.p
        if exp < 0:
            num *= p ** (-exp)
            exp = 0
        if num == 0:
            exp = 0
        else:
            while exp > 0 and num % p == 0:
                num //= p
                exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    @classmethod
    def _reduced(cls, ctx: ZpContext, num: int, exp: int) -> "ZpRational":
        """Trusted constructor for (num, exp) already in lowest terms."""
        x = object.__new__(cls)
        object.__setattr__(x, "ctx", ctx)
        object.__setattr__(x, "num", num)
        object.__setattr__(x, "exp", exp)
        return x

    # arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "ZpRational":
        if isinstance(other, ZpRational):
            _check_same(self, other)
            return other
        if isinstance(other, int):
            return ZpRational(self.ctx, other, 0)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p, e1, e2 = self.ctx.p, self.exp, other.exp
        if e1 == e2:
            return ZpRational(self.ctx, self.num + other.num, e1)
        # unequal depths: the deeper numerator is prime to p, so the sum is too
        if e1 > e2:
            return ZpRational._reduced(self.ctx, self.num + other.num * p ** (e1 - e2), e1)
        return ZpRational._reduced(self.ctx, self.num * p ** (e2 - e1) + other.num, e2)

    __radd__ = __add__

    def __neg__(self):
        return ZpRational._reduced(self.ctx, -self.num, self.exp)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.exp and other.exp:  # both numerators prime to p
            return ZpRational._reduced(self.ctx, self.num * other.num, self.exp + other.exp)
        return ZpRational(self.ctx, self.num * other.num, self.exp + other.exp)

    __rmul__ = __mul__

    def is_unit(self) -> bool:
        """True for ±p^k, the invertible elements of Z[1/p]."""
        if self.num == 0:
            return False
        n = abs(self.num)
        if self.exp > 0:
            return n == 1
        return n == self.ctx.p ** p_valuation(n, self.ctx.p)

    def inverse(self) -> "ZpRational":
        if not self.is_unit():
            raise NotInRing(f"{self} is not invertible in Z[1/{self.ctx.p}]")
        p = self.ctx.p
        sign = 1 if self.num > 0 else -1
        k = p_valuation(abs(self.num), p) - self.exp
        return ZpRational(self.ctx, sign, k)  # sign / p**k

    # predicates / conversions ------------------------------------------

    def is_integer(self) -> bool:
        return self.exp == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.ctx.p ** self.exp)

    def __float__(self):
        return float(self.to_fraction())

    def __str__(self):
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/{self.ctx.p}^{self.exp}"

    def __repr__(self):
        return f"ZpRational({self})"

    def to_json(self) -> dict:
        return {"num": str(self.num), "exp": self.exp}

    @classmethod
    def from_json(cls, ctx: ZpContext, data: dict) -> "ZpRational":
        return cls(ctx, int(data["num"]), int(data["exp"]))


@dataclass(frozen=True)
class PruferResidue:
    """An element ``num / p**exp mod 1`` of Z[1/p]/Z, with 0 <= num < p**exp."""

    ctx: ZpContext
    num: int
    exp: int = 0

    def __post_init__(self):
        p = self.ctx.p
        num, exp = int(self.num), int(self.exp)
        num %= p ** exp
        if num == 0:
            exp = 0
        else:
            while exp > 0 and num % p == 0:
                num //= p
                exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __add__(self, other: "PruferResidue") -> "PruferResidue":
        _check_same(self, other)
        p = self.ctx.p
        e = max(self.exp, other.exp)
        num = self.num * p ** (e - self.exp) + other.num * p ** (e - other.exp)
        return PruferResidue(self.ctx, num, e)

    def __neg__(self):
        return PruferResidue(self.ctx, -self.num, self.exp)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "PruferResidue":
        return PruferResidue(self.ctx, k * self.num, self.exp)

    def is_zero(self) -> bool:
        return self.num == 0

    def lift(self) -> ZpRational:
        """Representative in [0, 1)."""
        return ZpRational(self.ctx, self.num, self.exp)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, self.ctx.p ** self.exp)

    def __str__(self):
        return f"{self.num}/{self.ctx.p}^{self.exp} mod 1"


def zq_add(x: ZpRational, y: ZpRational) -> ZpRational:
    _check_same(x, y)
    return x + y


def zq_mul(x: ZpRational, y: ZpRational) -> ZpRational:
    _check_same(x, y)
    return x * y


def zq_from_fraction(ctx: ZpContext, n: int, d: int = 1) -> ZpRational:
    if d == 0:
        raise ZeroDivisionError("denominator is zero")
    g = gcd(n, d)
    n, d = n // g, d // g
    if d < 0:
        n, d = -n, -d
    k = p_valuation(d, ctx.p)
    if d != ctx.p ** k:
        raise NotInRing(f"{n}/{d} is not in Z[1/{ctx.p}]")
    return ZpRational(ctx, n, k)


def zq_from_value(ctx: ZpContext, value) -> ZpRational:
    """Accept an int, Fraction, ZpRational or a string like '3/4'."""
    if isinstance(value, ZpRational):
        _check_same(value, ZpRational(ctx, 0))
        return value
    if isinstance(value, int):
        return ZpRational(ctx, value)
    f = Fraction(value)
    return zq_from_fraction(ctx, f.numerator, f.denominator)


def zq_mod1(x: ZpRational) -> PruferResidue:
    return PruferResidue(x.ctx, x.num, x.exp)


def zq_depth(x: ZpRational) -> int:
    return x.exp
