"""
Exact group arithmetic for G_p = Z[1/p]^2 x| Z, the Heisenberg group over
Z[1/p], the 5x5 matrix groups K_p and G~_p, and the quotient
Q_p = (Z[1/p]/Z)^2 x| Z.

G_p elements are triples (a, b, c) with

    (a1, b1, c1)(a2, b2, c2) = (a1 + a2 + c1*b2, b1 + b2, c1 + c2).

Matrices are upper triangular with entries in Z[1/p]; they are stored as an
integer matrix over a common denominator p**den.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from operator import itemgetter, mul

import numpy as np

from . import rng as _rng
from .errors import MixedContext, PatternViolation, WitnessNotFound
from .exact import (
    PruferResidue,
    ZpContext,
    ZpRational,
    p_valuation,
    zq_from_value,
    zq_mod1,
)

# --------------------------------------------------------------------------
# G_p
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GpElement:
    a: ZpRational
    b: ZpRational
    c: int

    @property
    def ctx(self) -> ZpContext:
        return self.a.ctx

    def __mul__(self, other: "GpElement") -> "GpElement":
        return gp_mul(self, other)

    def inv(self) -> "GpElement":
        return gp_inv(self)

    def is_identity(self) -> bool:
        return self.a.num == 0 and self.b.num == 0 and self.c == 0

    def __str__(self):
        return f"({self.a}, {self.b}, {self.c})"

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "c": self.c}

    @classmethod
    def from_json(cls, ctx: ZpContext, data: dict) -> "GpElement":
        return cls(
            ZpRational.from_json(ctx, data["a"]),
            ZpRational.from_json(ctx, data["b"]),
            int(data["c"]),
        )


def gp(ctx: ZpContext, a=0, b=0, c: int = 0) -> GpElement:
    """Build (a, b, c); a and b may be ints, Fractions or strings like '1/2'."""
    return GpElement(zq_from_value(ctx, a), zq_from_value(ctx, b), int(c))


def gp_identity(ctx: ZpContext) -> GpElement:
    return GpElement(ctx.zero, ctx.zero, 0)


def gp_mul(g: GpElement, h: GpElement) -> GpElement:
    if g.ctx.p != h.ctx.p:
        raise MixedContext(f"p={g.ctx.p} mixed with p={h.ctx.p}")
    return GpElement(g.a + h.a + h.b * g.c, g.b + h.b, g.c + h.c)


def gp_inv(g: GpElement) -> GpElement:
    return GpElement(g.b * g.c - g.a, -g.b, -g.c)


def alpha_pow(v: tuple[ZpRational, ZpRational], c: int) -> tuple[ZpRational, ZpRational]:
    a, b = v
    return a + b * c, b


def in_Hp(g: GpElement) -> bool:
    return g.a.is_integer() and g.b.is_integer() and g.c == 0


# --------------------------------------------------------------------------
# Q_p = G_p / H_p
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class QpElement:
    abar: PruferResidue
    bbar: PruferResidue
    c: int

    @property
    def ctx(self) -> ZpContext:
        return self.abar.ctx

    def __mul__(self, other: "QpElement") -> "QpElement":
        return qp_mul(self, other)

    def inv(self) -> "QpElement":
        return QpElement(self.bbar.scale(self.c) - self.abar, -self.bbar, -self.c)

    def is_identity(self) -> bool:
        return self.abar.is_zero() and self.bbar.is_zero() and self.c == 0


def qp_of(g: GpElement) -> QpElement:
    return QpElement(zq_mod1(g.a), zq_mod1(g.b), g.c)


def qp_identity(ctx: ZpContext) -> QpElement:
    z = PruferResidue(ctx, 0, 0)
    return QpElement(z, z, 0)


def qp_mul(g: QpElement, h: QpElement) -> QpElement:
    if g.ctx.p != h.ctx.p:
        raise MixedContext(f"p={g.ctx.p} mixed with p={h.ctx.p}")
    return QpElement(g.abar + h.abar + h.bbar.scale(g.c), g.bbar + h.bbar, g.c + h.c)


# --------------------------------------------------------------------------
# Upper triangular matrices
# --------------------------------------------------------------------------

_UPPER5 = frozenset((i, j) for i in range(1, 6) for j in range(i + 1, 6))

# name -> (size, allowed off-diagonal slots, p-power diagonal slots, integer slots)
PATTERNS: dict[str, tuple[int, frozenset, frozenset, frozenset]] = {
    "Heis3": (3, frozenset({(1, 2), (1, 3), (2, 3)}), frozenset(), frozenset()),
    "HK": (5, frozenset({(1, 4), (1, 5)}), frozenset(), frozenset({(1, 4), (1, 5)})),
    "GK": (5, frozenset({(1, 4), (1, 5), (4, 5)}), frozenset(), frozenset({(4, 5)})),
    "N": (
        5,
        frozenset({(1, 2), (1, 4), (1, 5), (2, 4), (2, 5), (4, 5)}),
        frozenset(),
        frozenset({(4, 5)}),
    ),
    "Kp": (
        5,
        frozenset({(1, 2), (1, 4), (1, 5), (2, 4), (2, 5), (4, 5)}),
        frozenset({2}),
        frozenset({(4, 5)}),
    ),
    "Gtilde": (5, _UPPER5, frozenset({2, 3}), frozenset({(4, 5)})),
}

# Subgroup chain HK < GK < N < Kp < Gtilde; the join of two patterns is the
# larger one.
_CHAIN = ("HK", "GK", "N", "Kp", "Gtilde")


def pattern_join(p1: str, p2: str) -> str:
    if p1 == p2:
        return p1
    if p1 in _CHAIN and p2 in _CHAIN:
        return max(p1, p2, key=_CHAIN.index)
    raise PatternViolation(f"cannot combine patterns {p1} and {p2}")


def _is_ppower(v: int, p: int) -> bool:
    return v > 0 and v == p ** p_valuation(v, p)


@lru_cache(maxsize=None)
def _flat_pattern(pattern: str):
    """Flat-index view of a pattern: forbidden slots, p-power diagonal slots,
    unit diagonal slots and integral slots."""
    size, allowed, ppow, integral = PATTERNS[pattern]
    flat = lambda i, j: (i - 1) * size + (j - 1)  # noqa: E731
    cells = [(i, j) for i in range(1, size + 1) for j in range(1, size + 1)]
    forbidden = tuple(flat(i, j) for i, j in cells if i != j and (i, j) not in allowed)
    pp = tuple(flat(i, i) for i in range(1, size + 1) if i in ppow)
    ones = tuple(flat(i, i) for i in range(1, size + 1) if i not in ppow)
    integ = tuple(flat(i, j) for i, j in integral)
    return size, forbidden, pp, ones, integ


class UTMatrix:
    """Upper triangular matrix over Z[1/p], value ``ints / p**den``.

    ``pattern`` names the subgroup the matrix claims to lie in; it is
    validated on construction.  Equality ignores the pattern.
    """

    __slots__ = ("ctx", "size", "den", "ints", "pattern")

    def __init__(self, ctx: ZpContext, ints, den: int, pattern: str, check: bool = True):
        size = PATTERNS[pattern][0]
        ints = list(ints)
        if len(ints) != size * size:
            raise ValueError(f"expected {size * size} entries")
        p = ctx.p
        if den < 0:
            f = p ** (-den)
            ints = [x * f for x in ints]
            den = 0
        elif den > 0:
            g = gcd(*ints)
            v = den if g == 0 else min(den, p_valuation(g, p))
            if v:
                f = p ** v
                ints = [x // f for x in ints]
                den -= v
        self.ctx = ctx
        self.size = size
        self.den = den
        self.ints = tuple(ints)
        self.pattern = pattern
        if check:
            self.validate(pattern)

    # construction -------------------------------------------------------

    @classmethod
    def identity(cls, ctx: ZpContext, pattern: str = "Kp") -> "UTMatrix":
        s = PATTERNS[pattern][0]
        return cls(ctx, [int(i % (s + 1) == 0) for i in range(s * s)], 0, pattern)

    @classmethod
    def from_entries(cls, ctx: ZpContext, entries: dict, pattern: str, diag=None) -> "UTMatrix":
        """Identity plus ``entries`` {(i, j): value} (1-indexed), optional diagonal."""
        s = PATTERNS[pattern][0]
        vals = {}
        for (i, j), v in entries.items():
            vals[(i, j)] = zq_from_value(ctx, v)
        for i in range(1, s + 1):
            if (i, i) not in vals:
                vals[(i, i)] = zq_from_value(ctx, diag[i - 1]) if diag else ctx.one
        den = max((v.exp for v in vals.values()), default=0)
        p = ctx.p
        ints = [0] * (s * s)
        for (i, j), v in vals.items():
            ints[(i - 1) * s + (j - 1)] = v.num * p ** (den - v.exp)
        return cls(ctx, ints, den, pattern)

    # access -------------------------------------------------------------

    def entry(self, i: int, j: int) -> ZpRational:
        """1-indexed entry."""
        return ZpRational(self.ctx, self.ints[(i - 1) * self.size + (j - 1)], self.den)

    def entries(self) -> dict:
        """Nonzero off-diagonal entries keyed by 1-indexed (i, j)."""
        s = self.size
        out = {}
        for i in range(1, s + 1):
            for j in range(i + 1, s + 1):
                if self.ints[(i - 1) * s + (j - 1)]:
                    out[(i, j)] = self.entry(i, j)
        return out

    def diag_exponent(self, i: int) -> int:
        """n with entry (i, i) = p**n; the diagonal must be a p-power there."""
        v = self.ints[(i - 1) * self.size + (i - 1)]
        if not _is_ppower(v, self.ctx.p):
            raise PatternViolation(f"diagonal entry {i} is not a power of p")
        return p_valuation(v, self.ctx.p) - self.den

    def fits(self, pattern: str) -> bool:
        size, forbidden, ppow, ones, integral = _flat_pattern(pattern)
        if size != self.size:
            return False
        p, A = self.ctx.p, self.ints
        scale = p ** self.den
        return (
            not any(A[k] for k in forbidden)
            and all(A[k] == scale for k in ones)
            and all(_is_ppower(A[k], p) for k in ppow)
            and not any(A[k] % scale for k in integral)
        )

    def validate(self, pattern: str):
        if not self.fits(pattern):
            raise PatternViolation(f"matrix does not satisfy pattern {pattern}:\n{self}")

    def classify(self) -> str | None:
        """Smallest pattern of the subgroup chain that the matrix satisfies."""
        if self.size == 3:
            return "Heis3" if self.fits("Heis3") else None
        for name in _CHAIN:
            if self.fits(name):
                return name
        return None

    # group operations ---------------------------------------------------

    def _check(self, other: "UTMatrix"):
        if self.ctx.p != other.ctx.p:
            raise MixedContext(f"p={self.ctx.p} mixed with p={other.ctx.p}")
        if self.size != other.size:
            raise PatternViolation("size mismatch")

    def __mul__(self, other: "UTMatrix") -> "UTMatrix":
        return kp_mul(self, other)

    def inv(self) -> "UTMatrix":
        # Back-substitution over the integers: Y = p**F * M^{-1} is integral
        # when every diagonal entry of M is +-p**f and F is the sum of the f.
        s, M, p = self.size, self.ints, self.ctx.p
        diag = [M[i * s + i] for i in range(s)]
        fs = []
        for d in diag:
            if d == 0 or not _is_ppower(abs(d), p):
                raise PatternViolation("matrix is not invertible over Z[1/p]")
            fs.append(p_valuation(abs(d), p))
        F = sum(fs)
        pF = p ** F
        Y = [0] * (s * s)
        for i in range(s - 1, -1, -1):
            Y[i * s + i] = pF // diag[i]
            for j in range(i + 1, s):
                acc = 0
                for k in range(i + 1, j + 1):
                    acc += M[i * s + k] * Y[k * s + j]
                Y[i * s + j] = -acc // diag[i]
        return UTMatrix(self.ctx, Y, F - self.den, self.pattern)

    def conj(self, by: "UTMatrix") -> "UTMatrix":
        """``by^-1 * self * by``."""
        return by.inv() * self * by

    def is_identity(self) -> bool:
        s = self.size
        return self.den == 0 and all(v == (1 if k % (s + 1) == 0 else 0) for k, v in enumerate(self.ints))

    def __eq__(self, other):
        if not isinstance(other, UTMatrix):
            return NotImplemented
        return (
            self.ctx.p == other.ctx.p
            and self.size == other.size
            and self.den == other.den
            and self.ints == other.ints
        )

    def __hash__(self):
        return hash((self.ctx.p, self.size, self.den, self.ints))

    def __str__(self):
        s = self.size
        rows = []
        for i in range(1, s + 1):
            rows.append("[" + ", ".join(str(self.entry(i, j)) for j in range(1, s + 1)) + "]")
        return "\n".join(rows)

    def __repr__(self):
        return f"UTMatrix({self.pattern}, {self.entries()})"

    def to_json(self) -> dict:
        s = self.size
        return {
            "pattern": self.pattern,
            "p": self.ctx.p,
            "entries": [[self.entry(i, j).to_json() for j in range(1, s + 1)] for i in range(1, s + 1)],
        }

    @classmethod
    def from_json(cls, ctx: ZpContext, data: dict) -> "UTMatrix":
        rows = data["entries"]
        vals = {
            (i + 1, j + 1): ZpRational.from_json(ctx, v)
            for i, row in enumerate(rows)
            for j, v in enumerate(row)
        }
        den = max(v.exp for v in vals.values())
        s = len(rows)
        ints = [0] * (s * s)
        for (i, j), v in vals.items():
            ints[(i - 1) * s + (j - 1)] = v.num * ctx.p ** (den - v.exp)
        return cls(ctx, ints, den, data["pattern"])


@lru_cache(maxsize=None)
def _mul_plan(pattern: str):
    """For each slot that may be nonzero, getters for the left and right
    factors contributing to it; structural zeros of the pattern are skipped."""
    size, allowed = PATTERNS[pattern][:2]
    live = set(allowed) | {(i, i) for i in range(1, size + 1)}
    flat = lambda i, j: (i - 1) * size + (j - 1)  # noqa: E731
    single, multi = [], []
    for i, j in sorted(live):
        ks = [k for k in range(i, j + 1) if (i, k) in live and (k, j) in live]
        if len(ks) == 1:
            single.append((flat(i, j), flat(i, ks[0]), flat(ks[0], j)))
        else:
            left = itemgetter(*(flat(i, k) for k in ks))
            right = itemgetter(*(flat(k, j) for k in ks))
            multi.append((flat(i, j), left, right))
    return tuple(single), tuple(multi)


def kp_mul(g: UTMatrix, h: UTMatrix) -> UTMatrix:
    """Exact product; the result must satisfy the join of both patterns."""
    g._check(h)
    pattern = pattern_join(g.pattern, h.pattern)
    A, B = g.ints, h.ints
    out = [0] * (g.size * g.size)
    single, multi = _mul_plan(pattern)
    for slot, a, b in single:
        out[slot] = A[a] * B[b]
    for slot, left, right in multi:
        out[slot] = sum(map(mul, left(A), right(B)))
    return UTMatrix(g.ctx, out, g.den + h.den, pattern)


def elementary(ctx: ZpContext, i: int, j: int, x=1, pattern: str = "Gtilde") -> UTMatrix:
    """1 + x*e_ij."""
    return UTMatrix.from_entries(ctx, {(i, j): x}, pattern)


def diag_power(ctx: ZpContext, slot: int, n: int, pattern: str = "Kp") -> UTMatrix:
    """The diagonal matrix with p**n in position ``slot`` and 1 elsewhere."""
    diag = [1] * PATTERNS[pattern][0]
    diag[slot - 1] = ZpRational(ctx, 1, -n)
    return UTMatrix.from_entries(ctx, {}, pattern, diag=diag)


def commutator(g, h):
    """[g, h] = g^-1 h^-1 g h."""
    return g.inv() * h.inv() * g * h


def heis_embed(g: GpElement) -> UTMatrix:
    """(a, b, c) -> [[1, b, a - bc], [0, 1, -c], [0, 0, 1]]."""
    return UTMatrix.from_entries(
        g.ctx, {(1, 2): g.b, (1, 3): g.a - g.b * g.c, (2, 3): -g.c}, "Heis3"
    )


def gk_embed(g: GpElement) -> UTMatrix:
    """Isomorphism G_p -> G_K: x14 = -b, x15 = b*c - a, m = -c."""
    return UTMatrix.from_entries(
        g.ctx, {(1, 4): -g.b, (1, 5): g.b * g.c - g.a, (4, 5): -g.c}, "GK"
    )


def in_HK(m: UTMatrix) -> bool:
    return m.fits("HK")


def is_central_form(m: UTMatrix) -> bool:
    """True iff m = 1 + x*e15 for some x."""
    one = m.ctx.p ** m.den
    return (
        m.size == 5
        and set(m.entries()) <= {(1, 5)}
        and all(m.ints[6 * i] == one for i in range(5))
    )


# --------------------------------------------------------------------------
# random elements
# --------------------------------------------------------------------------


def random_zq(ctx: ZpContext, rng) -> ZpRational:
    num, = _rng.ints(rng, -_rng.NUM_BOUND, _rng.NUM_BOUND, 1)
    exp, = _rng.ints(rng, 0, _rng.EXP_MAX, 1)
    return ZpRational(ctx, num, exp)


@lru_cache(maxsize=None)
def _draw_bounds(k: int, n_int: int):
    """Bounds for k numerators, k exponents and n_int small integers."""
    lo = np.array([-_rng.NUM_BOUND] * k + [0] * k + [-_rng.C_BOUND] * n_int)
    hi = np.array([_rng.NUM_BOUND] * k + [_rng.EXP_MAX] * k + [_rng.C_BOUND] * n_int)
    return lo, hi


def _draw(rng, k: int, n_int: int) -> list[int]:
    lo, hi = _draw_bounds(k, n_int)
    return rng.integers(lo, hi, endpoint=True).tolist()


def random_gp(ctx: ZpContext, rng) -> GpElement:
    n1, n2, e1, e2, c = _draw(rng, 2, 1)
    return GpElement(ZpRational(ctx, n1, e1), ZpRational(ctx, n2, e2), c)


def random_qp(ctx: ZpContext, rng) -> QpElement:
    return qp_of(random_gp(ctx, rng))


_SLOTS = {
    "HK": [(1, 4), (1, 5)],
    "GK": [(1, 4), (1, 5)],
    "N": [(1, 2), (1, 4), (1, 5), (2, 4), (2, 5)],
    "Kp": [(1, 2), (1, 4), (1, 5), (2, 4), (2, 5)],
    "Gtilde": [(i, j) for i in range(1, 4) for j in range(i + 1, 6)],
}


def random_matrix(ctx: ZpContext, rng, pattern: str = "Kp") -> UTMatrix:
    """Random element of the subgroup named by ``pattern`` (not Heis3)."""
    slots = _SLOTS[pattern]
    k = len(slots)
    draws = _draw(rng, k, 3)
    nums, exps, (m, n, t) = draws[:k], draws[k:2 * k], draws[2 * k:]
    p = ctx.p
    if pattern == "HK":
        exps = [0] * k
    # common denominator p**den; diagonal p-powers enter as p**(den + n)
    dn = n if pattern in ("Kp", "Gtilde") else 0
    dt = t if pattern == "Gtilde" else 0
    den = max(exps + [-dn, -dt, 0])
    ints = [0] * 25
    for (i, j), num, e in zip(slots, nums, exps):
        ints[(i - 1) * 5 + (j - 1)] = num * p ** (den - e)
    for i in range(5):
        ints[6 * i] = p ** den
    ints[6] = p ** (den + dn)
    ints[12] = p ** (den + dt)
    if pattern != "HK":
        ints[19] = m * p ** den
    return UTMatrix(ctx, ints, den, pattern)


# --------------------------------------------------------------------------
# structural checks
# --------------------------------------------------------------------------


def _payload(x):
    return x.to_json() if hasattr(x, "to_json") else str(x)


def nilpotency_witness(ctx: ZpContext, family: str, trials: int, seed: int) -> dict:
    """Sample deep commutators to certify nilpotency class.

    ``family`` is ``"Gp"`` (expected class 2) or ``"N"`` (the n = 0 subgroup
    of K_p, expected class 3).  Raises WitnessNotFound if no sampled
    commutator of the expected depth is nontrivial.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = _rng.make_rng(seed)
    if family == "Gp":
        cls = 2
        sample = lambda: random_gp(ctx, rng)  # noqa: E731
    elif family in ("N", "N_of_Kp"):
        cls = 3
        sample = lambda: random_matrix(ctx, rng, "N")  # noqa: E731
    else:
        raise ValueError(f"unknown family {family!r}")

    counterexample = None
    witness = None
    for _ in range(trials):
        xs = [sample() for _ in range(cls + 1)]
        c = xs[0]
        for x in xs[1:cls]:
            c = commutator(c, x)
        if witness is None and not c.is_identity():
            witness = [_payload(x) for x in xs[:cls]]
        deep = commutator(c, xs[cls])
        if not deep.is_identity():
            counterexample = [_payload(x) for x in xs]
            break
    if counterexample is None and witness is None:
        raise WitnessNotFound(f"no nontrivial {cls}-fold commutator in {trials} trials")
    return {
        "family": "Gp" if family == "Gp" else "N",
        "expected_class": cls,
        "trials": trials,
        "seed": seed,
        "deep_commutators_trivial": counterexample is None,
        "witness": witness,
        "counterexample": counterexample,
        "passed": counterexample is None and witness is not None,
    }


def kp_generators(ctx: ZpContext) -> dict[str, UTMatrix]:
    return {
        "a": diag_power(ctx, 2, 1, "Kp"),
        "E12": elementary(ctx, 1, 2, 1, "Kp"),
        "E24": elementary(ctx, 2, 4, 1, "Kp"),
        "E25": elementary(ctx, 2, 5, 1, "Kp"),
        "E45": elementary(ctx, 4, 5, 1, "Kp"),
    }


def kp_structure_checks(ctx: ZpContext, trials: int, seed: int) -> dict:
    """Normality of H_K in K_p and the centre {1 + x e15} of K_p, by sampling."""
    normal_rng, center_rng = _rng.split(seed, 2)
    gens = kp_generators(ctx)

    normal_fail = None
    for _ in range(trials):
        k = random_matrix(ctx, normal_rng, "Kp")
        h = random_matrix(ctx, normal_rng, "HK")
        conj = k * h * k.inv()
        if not in_HK(conj):
            normal_fail = {"k": k.to_json(), "h": h.to_json()}
            break

    center_fail = None
    for _ in range(trials):
        x = random_zq(ctx, center_rng)
        z = elementary(ctx, 1, 5, x, "Kp")
        k = random_matrix(ctx, center_rng, "Kp")
        if z * k != k * z:
            center_fail = {"kind": "central element does not commute", "z": z.to_json(), "k": k.to_json()}
            break
        if not is_central_form(k) and all(k * g == g * k for g in gens.values()):
            center_fail = {"kind": "non-central element commutes with all generators", "k": k.to_json()}
            break

    return {
        "trials": trials,
        "seed": seed,
        "normality": {"passed": normal_fail is None, "counterexample": normal_fail},
        "center": {"passed": center_fail is None, "counterexample": center_fail},
        "passed": normal_fail is None and center_fail is None,
    }
