"""
A computable family of characters of Z[1/p] and the dual action of
alpha = [[1, 1], [0, 1]] on pairs of them.

A character is ``x -> exp(2 pi i (q*x + j*rho_m(x)/m))`` where q is an exact
rational angle and ``rho_m(k/p^e) = k * (p^-1 mod m)^e mod m`` (gcd(m, p) = 1).
Phases stay exact rationals mod 1 until the final complex exponential.

This family is not the whole dual group (a solenoid); it contains every
finite-order character together with rational-angle ones, which is all the
trace formulas need.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import InvalidOrder, MixedContext
from .exact import ZpContext, ZpRational

INFINITE = math.inf


@lru_cache(maxsize=None)
def _pinv(p: int, m: int) -> int:
    return pow(p, -1, m)


def rho(m: int, k: int, e: int, p: int) -> int:
    """rho_m(k / p**e); independent of the representative (k, e)."""
    if m == 1:
        return 0
    return k * pow(_pinv(p, m), e, m) % m


@dataclass(frozen=True)
class Character:
    ctx: ZpContext
    q: Fraction = Fraction(0)
    m: int = 1
    j: int = 0

    def __post_init__(self):
        q = Fraction(self.q)
        m, j = int(self.m), int(self.j)
        if m < 1:
            raise ValueError("torsion modulus must be positive")
        j %= m
        g = math.gcd(m, j)  # gcd(m, 0) = m collapses to the trivial torsion part
        m, j = m // g, j // g
        if math.gcd(m, self.ctx.p) != 1:
            raise InvalidOrder(f"torsion order {m} is divisible by p={self.ctx.p}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "j", j)

    def phase(self, x: ZpRational) -> Fraction:
        """Exact phase in [0, 1)."""
        return char_phase(self, x)

    def __call__(self, x: ZpRational) -> complex:
        return char_eval(self, x)

    def __mul__(self, other: "Character") -> "Character":
        return char_product(self, other)

    def __pow__(self, k: int) -> "Character":
        return Character(self.ctx, self.q * k, self.m, self.j * k)

    def is_trivial(self) -> bool:
        return self.q == 0 and self.m == 1

    def to_json(self) -> dict:
        return {"q": f"{self.q.numerator}/{self.q.denominator}", "m": self.m, "j": self.j}

    @classmethod
    def from_json(cls, ctx: ZpContext, data: dict) -> "Character":
        return cls(ctx, Fraction(data["q"]), int(data["m"]), int(data["j"]))


_ZERO = Fraction(0)


def _phase(p, q, m, j, num, exp):
    # q*x + j*rho/m over the single denominator qd * p**exp * m.
    if num == 0:
        return _ZERO
    t = j * rho(m, num, exp, p) % m if m > 1 else 0
    if q == 0:
        return Fraction(t, m) if t else _ZERO
    qn, qd = q.numerator, q.denominator
    d = qd * p ** exp
    return Fraction((qn * num * m + t * d) % (d * m), d * m)


def char_phase(chi: Character, x: ZpRational) -> Fraction:
    if chi.ctx.p != x.ctx.p:
        raise MixedContext(f"p={chi.ctx.p} mixed with p={x.ctx.p}")
    return _phase(chi.ctx.p, chi.q, chi.m, chi.j, x.num, x.exp)


def phase_to_complex(ph: Fraction) -> complex:
    # Exact quarter turns avoid sin/cos rounding on the commonest values.
    ph %= 1
    if ph.denominator <= 4 and ph.denominator != 3:
        return {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, Fraction(1, 2): -1 + 0j, Fraction(3, 4): -1j}[ph]
    return cmath.exp(2j * math.pi * float(ph))


def char_eval(chi: Character, x: ZpRational) -> complex:
    return phase_to_complex(char_phase(chi, x))


def char_product(chi: Character, psi: Character) -> Character:
    """Pointwise product: angles add, torsion parts combine modulo lcm."""
    if chi.ctx.p != psi.ctx.p:
        raise MixedContext(f"p={chi.ctx.p} mixed with p={psi.ctx.p}")
    L = chi.m * psi.m // math.gcd(chi.m, psi.m)
    j = chi.j * (L // chi.m) + psi.j * (L // psi.m)
    return Character(chi.ctx, chi.q + psi.q, L, j)


def char_order(chi: Character):
    """Order of chi, or INFINITE when the angle part is nonzero."""
    if chi.q != 0:
        return INFINITE
    return chi.m // math.gcd(chi.m, chi.j)


def trivial_character(ctx: ZpContext) -> Character:
    return Character(ctx)


def enumerate_order_n_chars(ctx: ZpContext, n: int) -> list[Character]:
    if n < 1:
        raise InvalidOrder("order must be >= 1")
    if n % ctx.p == 0:
        raise InvalidOrder(f"no character of Z[1/{ctx.p}] has order {n}: p divides it")
    if n == 1:
        return [Character(ctx)]
    return [Character(ctx, Fraction(0), n, j) for j in range(1, n) if math.gcd(j, n) == 1]


# --------------------------------------------------------------------------
# dual action on pairs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DualPoint:
    """chi(a, b) = chi1(a) * chi2(b); chi1 must have finite order."""

    chi1: Character
    chi2: Character

    def __post_init__(self):
        if self.chi1.q != 0:
            raise ValueError("chi1 must have finite order (zero angle)")

    def phase(self, a: ZpRational, b: ZpRational) -> Fraction:
        return (char_phase(self.chi1, a) + char_phase(self.chi2, b)) % 1


def dual_alpha(point: DualPoint) -> DualPoint:
    """(chi o alpha)(a, b) = chi1(a) (chi1 chi2)(b)."""
    return DualPoint(point.chi1, point.chi1 * point.chi2)


def probe_set(ctx: ZpContext, depth: int = 6) -> list[tuple[ZpRational, ZpRational]]:
    zero, one = ctx.zero, ctx.one
    probes = [(one, zero), (zero, one)]
    for e in range(1, depth + 1):
        x = ZpRational(ctx, 1, e)
        probes += [(x, zero), (zero, x)]
    return probes


def same_on_probes(u: DualPoint, v: DualPoint, probes) -> bool:
    return all(u.phase(a, b) == v.phase(a, b) for a, b in probes)


def orbit_period(point: DualPoint, cap: int, probes=None) -> int | None:
    """Least k <= cap with alpha^k(point) = point on the probe set."""
    probes = probe_set(point.chi1.ctx) if probes is None else probes
    cur = point
    for k in range(1, cap + 1):
        cur = dual_alpha(cur)
        if same_on_probes(cur, point, probes):
            return k
    return None


def is_periodic_point(point: DualPoint, m: int) -> bool:
    """True iff the dual orbit of ``point`` has exact period m.

    The order test on chi1 is cross-checked against iterating the dual
    action on the probe set; a disagreement raises RuntimeError.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    verdict = char_order(point.chi1) == m
    walked = orbit_period(point, m) == m
    if verdict != walked:
        raise RuntimeError(f"order test and orbit walk disagree for {point}, m={m}")
    return verdict
