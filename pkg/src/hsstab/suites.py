"""
Randomized invariant suites, one per module, driven by ``hsstab verify``.

Each check draws its cases from its own PCG64 stream (spawned from the run
seed), so reports are reproducible and a failing case is replayable from
(seed, check name, case index).  The first failure of a check is
serialized as its counterexample.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Callable

import numpy as np

from . import rng as _rng
from .chars import (
    DualPoint,
    char_order,
    char_phase,
    dual_alpha,
    is_periodic_point,
    probe_set,
    same_on_probes,
)
from .exact import ZpContext, ZpRational, zq_mod1
from .groups import (
    UTMatrix,
    gk_embed,
    gp_identity,
    heis_embed,
    kp_structure_checks,
    nilpotency_witness,
    qp_identity,
    qp_of,
    random_gp,
    random_matrix,
    random_qp,
    random_zq,
)
from .reps import (
    dichotomy_check,
    extreme_trace_eval,
    irrep_eval,
    perturbation_certificate,
    random_character,
    random_fdtrace,
    random_irrep_params,
)
from .words import (
    gtilde_normal_form,
    gtilde_relation_suite,
    hall_witt_check,
    kp_decompose,
    normal_form_product,
    word_eval,
)

log = logging.getLogger(__name__)

SUITES = ("exact", "groups", "words", "chars", "reps")
FLOAT_TOL = 1e-9


def _js(x):
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, (list, tuple)):
        return [_js(y) for y in x]
    return x if isinstance(x, (int, float, str, bool)) or x is None else str(x)


class _Runner:
    def __init__(self, name: str, p: int, seed: int, trials: int, n_checks: int):
        if trials < 1:
            raise ValueError("trials must be >= 1")
        self.name, self.p, self.seed, self.trials = name, p, seed, trials
        self.streams = iter(_rng.split(seed, n_checks))
        self.checks: list[dict] = []

    def sampled(self, check: str, case: Callable, trials: int | None = None):
        """``case(rng)`` returns (ok, inputs)."""
        rng = next(self.streams)
        n = self.trials if trials is None else trials
        for k in range(n):
            ok, inputs = case(rng)
            if not ok:
                log.info("%s/%s failed at case %d", self.name, check, k)
                self.checks.append(
                    {"name": check, "cases": k + 1, "passed": False,
                     "counterexample": {"case": k, "inputs": _js(inputs)}}
                )
                return
        self.checks.append({"name": check, "cases": n, "passed": True, "counterexample": None})

    def single(self, check: str, passed: bool, detail=None):
        next(self.streams)
        self.checks.append(
            {"name": check, "cases": 1, "passed": bool(passed),
             "counterexample": None if passed else detail, "detail": detail if passed else None}
        )

    def report(self) -> dict:
        return {
            "suite": self.name,
            "p": self.p,
            "seed": self.seed,
            "trials": self.trials,
            "checks": self.checks,
            "passed": all(c["passed"] for c in self.checks),
        }


# --------------------------------------------------------------------------


def suite_exact(ctx: ZpContext, seed: int, trials: int) -> dict:
    R = _Runner("exact", ctx.p, seed, trials, 6)

    def three(rng):
        return random_zq(ctx, rng), random_zq(ctx, rng), random_zq(ctx, rng)

    def ring_axioms(rng):
        x, y, z = three(rng)
        ok = (
            (x + y) + z == x + (y + z)
            and x + y == y + x
            and (x * y) * z == x * (y * z)
            and x * (y + z) == x * y + x * z
            and x + (-x) == ctx.zero
            and x * ctx.one == x
        )
        return ok, (x, y, z)

    def fraction_model(rng):
        x, y, _ = three(rng)
        X, Y = x.to_fraction(), y.to_fraction()
        return (x + y).to_fraction() == X + Y and (x * y).to_fraction() == X * Y, (x, y)

    def normal_form(rng):
        x = random_zq(ctx, rng)
        ok = x.exp >= 0 and (x.exp == 0 or x.num % ctx.p != 0)
        return ok and ZpRational.from_json(ctx, x.to_json()) == x, (x,)

    def units(rng):
        k, = _rng.ints(rng, -_rng.EXP_MAX, _rng.EXP_MAX, 1)
        s = 1 if rng.integers(2) else -1
        u = ZpRational(ctx, s, k)  # +-p^-k; negative exponents fold into the numerator
        return u.is_unit() and u * u.inverse() == ctx.one, (u,)

    def mod1_hom(rng):
        x, y, _ = three(rng)
        return zq_mod1(x + y) == zq_mod1(x) + zq_mod1(y) and zq_mod1(x).lift().to_fraction() == x.to_fraction() % 1, (x, y)

    def non_units(rng):
        x = random_zq(ctx, rng)
        # units are exactly +-p^k, i.e. numerator in lowest terms a power of p
        return x.is_unit() == _is_ppower(abs(x.to_fraction().numerator), ctx.p), (x,)

    R.sampled("ring axioms", ring_axioms)
    R.sampled("agrees with Fraction arithmetic", fraction_model)
    R.sampled("normal form and JSON round trip", normal_form)
    R.sampled("p-power units invert", units)
    R.sampled("reduction mod Z is additive", mod1_hom)
    R.sampled("unit test matches numerator", non_units)
    return R.report()


def _is_ppower(n: int, p: int) -> bool:
    if n == 0:
        return False
    while n % p == 0:
        n //= p
    return n == 1


# --------------------------------------------------------------------------


def _group_axioms(mul, inv, is_identity, identity):
    def check(x, y, z):
        xi = inv(x)
        return (
            mul(mul(x, y), z) == mul(x, mul(y, z))
            and is_identity(mul(x, xi))
            and is_identity(mul(xi, x))
            and mul(x, identity) == x
            and mul(identity, x) == x
        )
    return check


def suite_groups(ctx: ZpContext, seed: int, trials: int) -> dict:
    R = _Runner("groups", ctx.p, seed, trials, 11)
    gp_ax = _group_axioms(lambda g, h: g * h, lambda g: g.inv(), lambda g: g.is_identity(), gp_identity(ctx))
    qp_ax = _group_axioms(lambda g, h: g * h, lambda g: g.inv(), lambda g: g.is_identity(), qp_identity(ctx))

    def gp_case(rng):
        xs = [random_gp(ctx, rng) for _ in range(3)]
        return gp_ax(*xs), xs

    def qp_case(rng):
        xs = [random_qp(ctx, rng) for _ in range(3)]
        g, h = random_gp(ctx, rng), random_gp(ctx, rng)
        return qp_ax(*xs) and qp_of(g * h) == qp_of(g) * qp_of(h), xs + [g, h]

    def matrix_case(pattern):
        ident = UTMatrix.identity(ctx, pattern)
        ax = _group_axioms(lambda g, h: g * h, lambda g: g.inv(), lambda g: g.is_identity(), ident)

        def case(rng):
            xs = [random_matrix(ctx, rng, pattern) for _ in range(3)]
            closed = all((x * y).fits(pattern) and x.inv().fits(pattern) for x, y in zip(xs, xs[1:]))
            return closed and ax(*xs), xs
        return case

    def embed_case(embed):
        def case(rng):
            g, h = random_gp(ctx, rng), random_gp(ctx, rng)
            ok = embed(g * h) == embed(g) * embed(h) and embed(g.inv()) == embed(g).inv()
            # injectivity: the kernel meets the sample only at the identity
            ok = ok and (embed(g).is_identity() == g.is_identity())
            ok = ok and ((embed(g) == embed(h)) == (g == h))
            return ok, [g, h]
        return case

    R.sampled("G_p group axioms", gp_case)
    R.sampled("Q_p group axioms and quotient map", qp_case)
    for pattern in ("Kp", "Gtilde", "N", "GK"):
        R.sampled(f"{pattern} group axioms and closure", matrix_case(pattern))
    R.sampled("heis_embed is an injective homomorphism", embed_case(heis_embed))
    R.sampled("gk_embed is an injective homomorphism", embed_case(gk_embed))

    wit_gp = nilpotency_witness(ctx, "Gp", min(trials, 200), seed)
    R.single("G_p has nilpotency class 2", wit_gp["passed"], wit_gp)
    wit_n = nilpotency_witness(ctx, "N", min(trials, 200), seed)
    R.single("N has nilpotency class 3", wit_n["passed"], wit_n)
    st = kp_structure_checks(ctx, min(trials, 500), seed)
    R.single("H_K normal in K_p; centre of K_p", st["passed"], st)
    return R.report()


# --------------------------------------------------------------------------


def suite_words(ctx: ZpContext, seed: int, trials: int) -> dict:
    R = _Runner("words", ctx.p, seed, trials, 4)
    rel = gtilde_relation_suite(ctx)
    failed = [r for r in rel["relations"] if not r["passed"]]
    R.single(
        f"G~_p relations ({len(rel['relations'])} relations, grid of {len(rel['grid'])})",
        not failed,
        failed or {"relations": [r["name"] for r in rel["relations"]]},
    )

    def hall_witt(rng):
        xs = [random_matrix(ctx, rng, "Gtilde") for _ in range(3)]
        return hall_witt_check(*xs), xs

    def normal_form(rng):
        g = random_matrix(ctx, rng, "Gtilde")
        return normal_form_product(ctx, gtilde_normal_form(ctx, g)) == g, [g]

    def decompose(rng):
        g = random_matrix(ctx, rng, "Kp")
        return word_eval(ctx, kp_decompose(ctx, g)) == g, [g]

    R.sampled("Hall-Witt identity in G~_p", hall_witt)
    R.sampled("G~_p normal form round trip", normal_form)
    R.sampled("K_p word decomposition round trip", decompose)
    return R.report()


# --------------------------------------------------------------------------


def suite_chars(ctx: ZpContext, seed: int, trials: int) -> dict:
    R = _Runner("chars", ctx.p, seed, trials, 4)
    probes = probe_set(ctx)

    def hom(rng):
        chi = random_character(ctx, rng)
        x, y = random_zq(ctx, rng), random_zq(ctx, rng)
        return char_phase(chi, x + y) == (char_phase(chi, x) + char_phase(chi, y)) % 1, [chi, x, y]

    def product(rng):
        chi, psi = random_character(ctx, rng), random_character(ctx, rng)
        x = random_zq(ctx, rng)
        return char_phase(chi * psi, x) == (char_phase(chi, x) + char_phase(psi, x)) % 1, [chi, psi, x]

    def order(rng):
        chi = random_irrep_params(ctx, rng).chi1
        n = char_order(chi)
        x = random_zq(ctx, rng)
        ok = (chi ** n).is_trivial() and all(not (chi ** k).is_trivial() for k in range(1, n))
        return ok and char_phase(chi, x) * n % 1 == 0, [chi, x]

    def periodic(rng):
        pt = DualPoint(random_irrep_params(ctx, rng, max_order=12).chi1, random_character(ctx, rng))
        n = char_order(pt.chi1)
        cur = pt
        for _ in range(n):
            cur = dual_alpha(cur)
        ok = same_on_probes(cur, pt, probes) and is_periodic_point(pt, n)
        return ok, [pt.chi1, pt.chi2]

    R.sampled("characters are additive", hom)
    R.sampled("pointwise product", product)
    R.sampled("order of finite-order characters", order)
    R.sampled("periodic points have period ord(chi1)", periodic, min(trials, 500))
    return R.report()


# --------------------------------------------------------------------------


def dichotomy_points(ctx: ZpContext, depth: int = 6) -> list[ZpRational]:
    return [ZpRational(ctx, 1, k) for k in range(depth + 1)]


def suite_reps(ctx: ZpContext, seed: int, trials: int, tol: float = 1e-10, max_order: int = 50) -> dict:
    R = _Runner("reps", ctx.p, seed, trials, 4)
    points = dichotomy_points(ctx)

    def trace_oracle(rng):
        params = random_irrep_params(ctx, rng, max_order=max_order)
        g = random_gp(ctx, rng)
        M = irrep_eval(params, g)
        ok = abs(np.trace(M) / params.dim - extreme_trace_eval(params, g)) <= tol
        ok = ok and np.allclose(M @ M.conj().T, np.eye(params.dim), atol=tol, rtol=0)
        return ok, [params, g]

    def homomorphism(rng):
        params = random_irrep_params(ctx, rng, max_order=max_order)
        g, h = random_gp(ctx, rng), random_gp(ctx, rng)
        err = np.max(np.abs(irrep_eval(params, g * h) - irrep_eval(params, g) @ irrep_eval(params, h)))
        return err <= tol, [params, g, h]

    def dichotomy(rng):
        t = random_fdtrace(ctx, rng)
        for a in points:
            if not dichotomy_check(t, a, FLOAT_TOL).ok:
                return False, [t, a]
        return True, None

    R.sampled("closed-form trace matches matrix trace", trace_oracle, min(trials, 1000))
    R.sampled("irreps are homomorphisms", homomorphism, min(trials, 1000))
    R.sampled("dichotomy on finite-dimensional traces", dichotomy)
    cert = perturbation_certificate(1, 0)
    R.single("certificate at (1, 0) is 1/3", abs(cert - Fraction(1, 3)) <= 1e-12, {"certificate": cert})
    return R.report()


def run_suite(name: str, ctx: ZpContext, seed: int, trials: int) -> dict:
    fn = {
        "exact": suite_exact,
        "groups": suite_groups,
        "words": suite_words,
        "chars": suite_chars,
        "reps": suite_reps,
    }[name]
    return fn(ctx, seed, trials)
