"""
Finite-dimensional irreducible representations of G_p and their traces.

For a finite-order chi1 of order n, any chi2 and lambda = exp(2 pi i theta):

    pi(a, b, 0) = diag_i chi1(a) chi2(b) chi1(b)^i        (i = 0 .. n-1)
    pi(0, 0, 1) = lambda * S,   S[i, i+1 mod n] = 1
    pi(a, b, c) = pi(a, b, 0) pi(0, 0, 1)^c

and the normalized trace is chi1(a) chi2(b) lambda^c when chi1(b) = 1 and
n | c, and 0 otherwise.  Every finite-dimensional trace is a convex
combination of these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .chars import Character, char_order, char_phase, phase_to_complex
from .errors import DomainError
from .exact import ZpContext, ZpRational
from .groups import GpElement, gp

TYPE1 = "Type1"
TYPE2 = "Type2"


@dataclass(frozen=True)
class IrrepParams:
    chi1: Character
    chi2: Character
    lambda_angle: Fraction = Fraction(0)

    def __post_init__(self):
        if self.chi1.q != 0:
            raise ValueError("chi1 must have finite order")
        object.__setattr__(self, "lambda_angle", Fraction(self.lambda_angle) % 1)

    @property
    def ctx(self) -> ZpContext:
        return self.chi1.ctx

    @property
    def dim(self) -> int:
        return char_order(self.chi1)

    def to_json(self) -> dict:
        th = self.lambda_angle
        return {
            "chi1": self.chi1.to_json(),
            "chi2": self.chi2.to_json(),
            "lambda": f"{th.numerator}/{th.denominator}",
        }

    @classmethod
    def from_json(cls, ctx: ZpContext, data: dict) -> "IrrepParams":
        return cls(
            Character.from_json(ctx, data["chi1"]),
            Character.from_json(ctx, data["chi2"]),
            Fraction(data["lambda"]),
        )


def irrep_eval(params: IrrepParams, g: GpElement) -> np.ndarray:
    n = params.dim
    ph_a = char_phase(params.chi1, g.a)
    ph_b1 = char_phase(params.chi1, g.b)
    base = ph_a + char_phase(params.chi2, g.b) + g.c * params.lambda_angle
    M = np.zeros((n, n), dtype=np.complex128)
    c = g.c % n
    for i in range(n):
        M[i, (i + c) % n] = phase_to_complex(base + i * ph_b1)
    return M


def extreme_trace_phase(params: IrrepParams, g: GpElement) -> Fraction | None:
    """Exact phase of the trace value, or None where the trace vanishes."""
    if g.c % params.dim or char_phase(params.chi1, g.b):
        return None
    ph = char_phase(params.chi1, g.a)
    if g.b.num:
        ph += char_phase(params.chi2, g.b)
    if g.c:
        ph += g.c * params.lambda_angle
    return ph % 1


# An extreme trace is determined by its parameters.
ExtremeTrace = IrrepParams


def extreme_trace_eval(t: IrrepParams, g: GpElement) -> complex:
    ph = extreme_trace_phase(t, g)
    return 0j if ph is None else phase_to_complex(ph)


def trace_type(t: IrrepParams) -> str:
    return TYPE1 if char_phase(t.chi1, t.ctx.one) == 0 else TYPE2


@dataclass(frozen=True)
class FDTrace:
    components: tuple  # of (weight, IrrepParams)

    def __post_init__(self):
        comps = tuple((float(w), t) for w, t in self.components)
        if not comps:
            raise ValueError("empty convex combination")
        if any(not (0.0 < w <= 1.0) for w, _ in comps):
            raise ValueError("weights must lie in (0, 1]")
        if abs(math.fsum(w for w, _ in comps) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "components", comps)

    def __call__(self, g: GpElement) -> complex:
        return fd_trace_eval(self, g)

    def to_json(self) -> dict:
        return {"components": [{"weight": w, **t.to_json()} for w, t in self.components]}

    @classmethod
    def from_json(cls, ctx: ZpContext, data: dict) -> "FDTrace":
        return cls(tuple((c["weight"], IrrepParams.from_json(ctx, c)) for c in data["components"]))


def fd_trace_eval(t: FDTrace, g: GpElement) -> complex:
    return sum((w * extreme_trace_eval(x, g) for w, x in t.components), 0j)


class Dichotomy(NamedTuple):
    lhs: float
    rhs: float
    ok: bool


def dichotomy_check(t: FDTrace, a: ZpRational, slack: float = 1e-9) -> Dichotomy:
    """|tau(a,0,0) - 1| <= 2 (1 - |tau(0,1,0)|).

    Split tau = mu*tau1 + (1-mu)*tau2 into type 1 and type 2 parts.  Type 2
    traces vanish at (0,1,0), so |tau(0,1,0)| <= mu; type 1 traces are 1 at
    (a,0,0), so tau(a,0,0) - 1 = (1-mu)(z - 1) with |z| <= 1.
    """
    ctx = a.ctx
    lhs = abs(fd_trace_eval(t, GpElement(a, ctx.zero, 0)) - 1)
    rhs = 2 * (1 - abs(fd_trace_eval(t, gp(ctx, 0, 1, 0))))
    return Dichotomy(lhs, rhs, lhs <= rhs + slack)


def perturbation_certificate(t1: complex, t0: complex, slack: float = 1e-9) -> float:
    """Lower bound on max(||pi(g1) - sigma(g1)||_2, ||pi(g0) - sigma(g0)||_2)
    over every unitary representation sigma of the same dimension, where
    g1 = (0,1,0), g0 = (1/p,0,0), t1 = Tr pi(g1), t0 = Tr pi(g0).

    With d the larger distance: Cauchy-Schwarz gives |Tr sigma(g)| within d
    of |Tr pi(g)|; the dichotomy applied to Tr o sigma gives
    |Tr sigma(g0)| >= 1 - 2(1 - |t1| + d); and |Tr sigma(g0)| <= |t0| + d.
    Hence 3d >= 1 - 2(1 - |t1|) - |t0|.
    """
    m1, m0 = abs(t1), abs(t0)
    if m1 > 1 + slack or m0 > 1 + slack:
        raise DomainError("trace values must have modulus at most 1")
    return max(0.0, (1 - 2 * (1 - m1) - m0) / 3)


# --------------------------------------------------------------------------
# sampling
# --------------------------------------------------------------------------


def coprime_orders(p: int, max_order: int) -> list[int]:
    return [n for n in range(1, max_order + 1) if n % p]


def _pick(rng, seq):
    return seq[int(rng.integers(len(seq)))]


def random_character(ctx: ZpContext, rng, max_order: int = 30) -> Character:
    """Rational angle with denominator <= 9 p^4 times a random torsion part."""
    den = int(rng.integers(1, 9 * ctx.p ** 4, endpoint=True))
    q = Fraction(int(rng.integers(den)), den)
    m = _pick(rng, coprime_orders(ctx.p, max_order))
    return Character(ctx, q, m, int(rng.integers(m)))


def random_irrep_params(ctx: ZpContext, rng, max_order: int = 30, order: int | None = None) -> IrrepParams:
    n = order if order is not None else _pick(rng, coprime_orders(ctx.p, max_order))
    units = [j for j in range(n) if math.gcd(j, n) == 1]
    chi1 = Character(ctx, 0, n, _pick(rng, units))
    den = int(rng.integers(1, 64, endpoint=True))
    theta = Fraction(int(rng.integers(den)), den)
    return IrrepParams(chi1, random_character(ctx, rng, max_order), theta)


def random_fdtrace(ctx: ZpContext, rng, max_components: int = 20, max_order: int = 30) -> FDTrace:
    k = int(rng.integers(1, max_components, endpoint=True))
    u = 1.0 - rng.random(k)  # in (0, 1]
    w = u / u.sum()
    return FDTrace(tuple((float(x), random_irrep_params(ctx, rng, max_order)) for x in w))


class DirectSumRep:
    """A genuine unitary representation: V (pi_1 + ... + pi_k) V*."""

    def __init__(self, blocks: list[IrrepParams], conj: np.ndarray | None = None):
        self.blocks = list(blocks)
        self.conj = conj
        self.dim = sum(b.dim for b in self.blocks)

    def __call__(self, g: GpElement) -> np.ndarray:
        M = np.zeros((self.dim, self.dim), dtype=np.complex128)
        k = 0
        for b in self.blocks:
            M[k:k + b.dim, k:k + b.dim] = irrep_eval(b, g)
            k += b.dim
        if self.conj is not None:
            M = self.conj @ M @ self.conj.conj().T
        return M


def haar_unitary(n: int, rng) -> np.ndarray:
    Z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_direct_sum(ctx: ZpContext, dim: int, rng, max_order: int = 30, conjugate: bool = True) -> DirectSumRep:
    blocks = []
    left = dim
    while left:
        orders = coprime_orders(ctx.p, min(max_order, left))
        blocks.append(random_irrep_params(ctx, rng, order=_pick(rng, orders)))
        left -= blocks[-1].dim
    return DirectSumRep(blocks, haar_unitary(dim, rng) if conjugate else None)
