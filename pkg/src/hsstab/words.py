"""
Generator words for K_p and G~_p, their evaluation to matrices, the
finite-generation algorithm for K_p, the G~_p relation suite and normal
forms.

Alphabets
    K_p:  a = diag(1,p,1,1,1), E12, E24, E25, E45        (Eij = 1 + e_ij)
    G~_p: d2 = diag(1,p,1,1,1), d3 = diag(1,1,p,1,1), Eij for 1 <= i <= 3, i < j <= 5,
          plus E45 for the cyclic factor of G~_p = G x| Z.

Commutators follow [g, h] = g^-1 h^-1 g h throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .errors import PatternViolation
from .exact import ZpContext, ZpRational, zq_from_value
from .groups import UTMatrix, diag_power, elementary

KP_ALPHABET = ("a", "E12", "E24", "E25", "E45")
G_POSITIONS = ((1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5))
GTILDE_ALPHABET = ("d2", "d3") + tuple(f"E{i}{j}" for i, j in G_POSITIONS) + ("E45",)
ALPHABETS = {"Kp": KP_ALPHABET, "Gtilde": GTILDE_ALPHABET}


class Word:
    """Reduced word: nonzero exponents, no two adjacent equal generators."""

    __slots__ = ("family", "letters")

    def __init__(self, letters=(), family: str = "Kp"):
        alphabet = ALPHABETS[family]
        out: list[list] = []
        for gen, e in letters:
            if gen not in alphabet:
                raise ValueError(f"generator {gen!r} not in the {family} alphabet")
            e = int(e)
            if out and out[-1][0] == gen:
                out[-1][1] += e
                if out[-1][1] == 0:
                    out.pop()
            elif e:
                out.append([gen, e])
        self.family = family
        self.letters = tuple((g, e) for g, e in out)

    @classmethod
    def gen(cls, name: str, exp: int = 1, family: str = "Kp") -> "Word":
        return cls([(name, exp)], family)

    def __mul__(self, other: "Word") -> "Word":
        if self.family != other.family:
            raise ValueError("words from different families")
        return Word(self.letters + other.letters, self.family)

    def inv(self) -> "Word":
        return Word([(g, -e) for g, e in reversed(self.letters)], self.family)

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inv()
        out = Word((), self.family)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __len__(self):
        return len(self.letters)

    def __eq__(self, other):
        return isinstance(other, Word) and (self.family, self.letters) == (other.family, other.letters)

    def __hash__(self):
        return hash((self.family, self.letters))

    def __repr__(self):
        if not self.letters:
            return "Word(1)"
        return "Word(" + " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters) + ")"

    def to_json(self) -> list:
        return [[g, e] for g, e in self.letters]

    @classmethod
    def from_json(cls, data: list, family: str = "Kp") -> "Word":
        return cls([(g, e) for g, e in data], family)


def wcomm(u: Word, v: Word) -> Word:
    return u.inv() * v.inv() * u * v


def _pattern(family: str) -> str:
    return "Kp" if family == "Kp" else "Gtilde"


def generator_power(ctx: ZpContext, gen: str, k: int, family: str) -> UTMatrix:
    pattern = _pattern(family)
    if gen in ("a", "d2"):
        return diag_power(ctx, 2, k, pattern)
    if gen == "d3":
        return diag_power(ctx, 3, k, pattern)
    return elementary(ctx, int(gen[1]), int(gen[2]), k, pattern)


def word_eval(ctx: ZpContext, w: Word) -> UTMatrix:
    out = UTMatrix.identity(ctx, _pattern(w.family))
    for gen, k in w.letters:
        out = out * generator_power(ctx, gen, k, w.family)
    return out


# --------------------------------------------------------------------------
# words for 1 + r e_ij
# --------------------------------------------------------------------------


def scaled_elementary_word(ctx: ZpContext, i: int, j: int, r, family: str = "Kp") -> Word:
    """A word evaluating to 1 + r*e_ij.

    r = k / p**e is reached by conjugating E_ij**k with a power of a diagonal
    generator; e14 and e15 are reached through commutators.
    """
    r = zq_from_value(ctx, r)
    if r.num == 0:
        return Word((), family)
    k, e = r.num, r.exp
    W = lambda g, x=1: Word.gen(g, x, family)  # noqa: E731
    name = f"E{i}{j}"
    if (i, j) == (4, 5):
        if e:
            raise PatternViolation("the (4,5) slot must be an integer")
        return W(name, k)
    if family == "Kp":
        if (i, j) == (1, 2):
            return W("a", e) * W(name, k) * W("a", -e)
        if (i, j) in ((2, 4), (2, 5)):
            return W("a", -e) * W(name, k) * W("a", e)
        if (i, j) == (1, 4):
            return wcomm(scaled_elementary_word(ctx, 1, 2, r, family), W("E24"))
        if (i, j) == (1, 5):
            return wcomm(scaled_elementary_word(ctx, 1, 4, r, family), W("E45"))
        raise PatternViolation(f"position {(i, j)} is not in K_p")
    if (i, j) == (1, 2):
        return W("d2", e) * W(name, k) * W("d2", -e)
    if i == 2:
        return W("d2", -e) * W(name, k) * W("d2", e)
    if (i, j) == (1, 3):
        return W("d3", e) * W(name, k) * W("d3", -e)
    if i == 3:
        return W("d3", -e) * W(name, k) * W("d3", e)
    if (i, j) == (1, 4):
        return wcomm(scaled_elementary_word(ctx, 1, 2, r, family), W("E24"))
    if (i, j) == (1, 5):
        return wcomm(scaled_elementary_word(ctx, 1, 2, r, family), W("E25"))
    raise PatternViolation(f"position {(i, j)} is not in G~_p")


def kp_decompose(ctx: ZpContext, g: UTMatrix) -> Word:
    """Word in a, E12, E24, E25, E45 evaluating exactly to g in K_p.

    g = h a^n with h in N, and
    h = (1+m e45)(1+x24 e24)(1+x25 e25)(1+x12 e12)(1+x14 e14)(1+x15 e15)
    holds entrywise for that ordering.
    """
    g.validate("Kp")
    n = g.diag_exponent(2)
    h = g * diag_power(ctx, 2, -n, "Kp")
    w = Word((), "Kp")
    for i, j in ((4, 5), (2, 4), (2, 5), (1, 2), (1, 4), (1, 5)):
        w = w * scaled_elementary_word(ctx, i, j, h.entry(i, j), "Kp")
    return w * Word.gen("a", n)


# --------------------------------------------------------------------------
# G~_p presentation
# --------------------------------------------------------------------------


def default_grid(ctx: ZpContext) -> list[ZpRational]:
    p = ctx.p
    base = [Fraction(0), Fraction(1), Fraction(1, p), Fraction(1, p * p), 1 + Fraction(1, p)]
    vals = []
    for v in base:
        vals.append(v)
        if v:
            vals.append(-v)
    return [zq_from_value(ctx, v) for v in vals]


def _gw(name, k=1):
    return Word.gen(name, k, "Gtilde")


def _check(ctx, name, group, lhs: Word, rhs: Word) -> dict:
    ok = word_eval(ctx, lhs) == word_eval(ctx, rhs)
    return {"name": name, "group": group, "lhs": lhs.to_json(), "rhs": rhs.to_json(), "passed": ok}


def _family_check(ctx, name, group, cases) -> dict:
    """``cases`` yields (params, lhs, rhs); record parameter values that fail."""
    failures = []
    n = 0
    for params, lhs, rhs in cases:
        n += 1
        if word_eval(ctx, lhs) != word_eval(ctx, rhs):
            failures.append([str(x) for x in params])
    return {"name": name, "group": group, "instances": n, "failures": failures, "passed": not failures}


def gtilde_relation_suite(ctx: ZpContext, grid=None) -> dict:
    """Evaluate every defining relation of G (the m = 0 part of G~_p) under
    d2 -> diag(1,p,1,1,1), d3 -> diag(1,1,p,1,1), e_ij -> 1 + e_ij, plus the
    parametric commutator identities on a finite grid of r, s values.
    """
    p = ctx.p
    grid = default_grid(ctx) if grid is None else [zq_from_value(ctx, v) for v in grid]
    E = lambda i, j, k=1: _gw(f"E{i}{j}", k)  # noqa: E731
    d2, d3 = _gw("d2"), _gw("d3")
    one = Word((), "Gtilde")
    rel = []

    rel.append(_check(ctx, "[d2,d3] = 1", "d2", wcomm(d2, d3), one))
    for j in (3, 4, 5):
        rel.append(_check(ctx, f"d2 e2{j} d2^-1 = e2{j}^p", "d2", d2 * E(2, j) * d2.inv(), E(2, j, p)))
    rel.append(_check(ctx, "d2^-1 e12 d2 = e12^p", "d2", d2.inv() * E(1, 2) * d2, E(1, 2, p)))
    for i, j in ((1, 3), (1, 4), (1, 5), (3, 4), (3, 5)):
        rel.append(_check(ctx, f"[d2,e{i}{j}] = 1", "d2", wcomm(d2, E(i, j)), one))

    for j in (4, 5):
        rel.append(_check(ctx, f"d3 e3{j} d3^-1 = e3{j}^p", "d3", d3 * E(3, j) * d3.inv(), E(3, j, p)))
    for i in (1, 2):
        rel.append(_check(ctx, f"d3^-1 e{i}3 d3 = e{i}3^p", "d3", d3.inv() * E(i, 3) * d3, E(i, 3, p)))
    for i, j in ((1, 2), (1, 4), (1, 5), (2, 4), (2, 5)):
        rel.append(_check(ctx, f"[d3,e{i}{j}] = 1", "d3", wcomm(d3, E(i, j)), one))

    pairs = [(a, b) for a in G_POSITIONS for b in G_POSITIONS if a[1] <= b[0]]
    for (i, j), (k, l) in pairs:
        rhs = E(i, l) if j == k else one
        target = f"e{i}{l}" if j == k else "1"
        rel.append(_check(ctx, f"[e{i}{j},e{k}{l}] = {target}", "e", wcomm(E(i, j), E(k, l)), rhs))

    rel.append(
        _check(ctx, "d2^-1 e23 d2 = d3 e23 d3^-1", "coherence", d2.inv() * E(2, 3) * d2, d3 * E(2, 3) * d3.inv())
    )

    S = lambda i, j, r: scaled_elementary_word(ctx, i, j, r, "Gtilde")  # noqa: E731

    for (i, j), (k, l) in pairs:
        def cases(i=i, j=j, k=k, l=l):
            for r, s in product(grid, grid):
                rhs = S(i, l, r * s) if j == k else one
                yield (r, s), wcomm(S(i, j, r), S(k, l, s)), rhs
        target = f"rs e{i}{l}" if j == k else "1"
        rel.append(_family_check(ctx, f"[r e{i}{j}, s e{k}{l}] = {target}", "parametric", cases()))

    def grid2():
        return product(grid, grid)

    for (a, b), (c, d) in (((3, 5), (1, 2)), ((3, 5), (1, 4)), ((2, 5), (1, 3)), ((2, 5), (1, 4))):
        rel.append(
            _family_check(
                ctx,
                f"[r e{a}{b}, s e{c}{d}] = 1",
                "derived",
                (((r, s), wcomm(S(a, b, r), S(c, d, s)), one) for r, s in grid2()),
            )
        )
    rel.append(
        _family_check(
            ctx,
            "[r e12, s e25] = [r e13, s e35]",
            "derived",
            (((r, s), wcomm(S(1, 2, r), S(2, 5, s)), wcomm(S(1, 3, r), S(3, 5, s))) for r, s in grid2()),
        )
    )
    for i, j in G_POSITIONS:
        rel.append(
            _family_check(
                ctx,
                f"[r e15, s e{i}{j}] = 1",
                "derived",
                (((r, s), wcomm(S(1, 5, r), S(i, j, s)), one) for r, s in grid2()),
            )
        )
    for dname in ("d2", "d3"):
        rel.append(
            _family_check(
                ctx,
                f"[r e15, {dname}] = 1",
                "derived",
                (((r,), wcomm(S(1, 5, r), _gw(dname)), one) for r in grid),
            )
        )

    return {
        "p": p,
        "grid": [str(g) for g in grid],
        "relations": rel,
        "passed": all(r["passed"] for r in rel),
    }


def hall_witt_check(x, y, z) -> bool:
    """[x^y,[y,z]] [y^z,[z,x]] [z^x,[x,y]] == 1 with x^y = y^-1 x y."""

    def comm(g, h):
        return g.inv() * h.inv() * g * h

    def conj(g, h):
        return h.inv() * g * h

    w = comm(conj(x, y), comm(y, z)) * comm(conj(y, z), comm(z, x)) * comm(conj(z, x), comm(x, y))
    return w.is_identity()


# --------------------------------------------------------------------------
# normal form
# --------------------------------------------------------------------------

NORMAL_ORDER = ((1, 5), (2, 5), (3, 5), (1, 4), (2, 4), (3, 4), (1, 3), (2, 3), (1, 2))


@dataclass(frozen=True)
class NormalForm:
    """g = prod_{(i,j) in NORMAL_ORDER} (1 + r_ij e_ij) * d2^n * d3^m * (1 + e45)^t."""

    r: dict = field(hash=False)
    n: int
    m: int
    t: int = 0


def normal_form_product(ctx: ZpContext, nf: NormalForm) -> UTMatrix:
    out = UTMatrix.identity(ctx, "Gtilde")
    for i, j in NORMAL_ORDER:
        out = out * elementary(ctx, i, j, nf.r.get((i, j), 0), "Gtilde")
    out = out * diag_power(ctx, 2, nf.n, "Gtilde") * diag_power(ctx, 3, nf.m, "Gtilde")
    return out * elementary(ctx, 4, 5, nf.t, "Gtilde")


def gtilde_normal_form(ctx: ZpContext, g: UTMatrix) -> NormalForm:
    """Coefficients of the ordered product, by peeling factors off the right.

    After removing the factors that come later in NORMAL_ORDER, the entry at
    the next position receives no contribution from products of two or more
    remaining factors, so it equals that factor's coefficient.
    """
    g.validate("Gtilde")
    t = g.entry(4, 5).num
    h = g * elementary(ctx, 4, 5, -t, "Gtilde")
    n, m = h.diag_exponent(2), h.diag_exponent(3)
    w = h * diag_power(ctx, 3, -m, "Gtilde") * diag_power(ctx, 2, -n, "Gtilde")
    r = {}
    for i, j in reversed(NORMAL_ORDER):
        x = w.entry(i, j)
        if x.num:
            r[(i, j)] = x
            w = w * elementary(ctx, i, j, -x, "Gtilde")
    if not w.is_identity():
        raise PatternViolation("residual factor after peeling; not a G~_p element")
    return NormalForm(r, n, m, t)
