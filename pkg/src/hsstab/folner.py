"""
Følner compressions of the left regular representation of
Q_p = (Z[1/p]/Z)^2 x| Z and the approximate homomorphisms of G_p they give.

The Følner set is F = A_N^2 x [0, M) with A_N = (1/p^N)Z/Z.  A_N^2 is
invariant under alpha and under translation by elements of depth <= N, so
only the c coordinate leaks out of F.  Points are indexed by

    (k1, k2, c) -> k1 * p^N * M + k2 * M + c,   a = k1/p^N, b = k2/p^N.

x_F = P_F lambda_g P_F is a 0/1 partial permutation; pi_F(g) completes it to
a permutation by matching free rows to free columns in ascending order.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DepthExceeded, FrameTooLarge
from .exact import ZpContext, zq_depth, zq_mod1
from .groups import GpElement, gk_embed, gp, gp_mul, in_Hp, in_HK
from .numkernel import NormEstimate, complete_partial_permutation, hs_norm, op_norm_linear
from .reps import perturbation_certificate, random_direct_sum
from . import rng as _rng

DEFAULT_CAP = 4096


@dataclass(frozen=True)
class FolnerFrame:
    p: int
    N: int
    M: int

    @property
    def ctx(self) -> ZpContext:
        return ZpContext(self.p)

    @property
    def P(self) -> int:
        return self.p ** self.N

    @property
    def size(self) -> int:
        return self.P * self.P * self.M

    def index(self, k1: int, k2: int, c: int) -> int:
        return (k1 * self.P + k2) * self.M + c

    def point(self, idx: int) -> tuple[int, int, int]:
        k12, c = divmod(idx, self.M)
        k1, k2 = divmod(k12, self.P)
        return k1, k2, c

    def to_json(self) -> dict:
        return {"p": self.p, "N": self.N, "M": self.M, "size": self.size}


def frame_build(p: int, N: int, M: int, cap: int = DEFAULT_CAP) -> FolnerFrame:
    if N < 1 or M < 1:
        raise ValueError("N and M must be >= 1")
    frame = FolnerFrame(p, N, M)
    ZpContext(p)  # validates p
    if frame.size > cap:
        raise FrameTooLarge(f"frame size {frame.size} exceeds cap {cap}")
    return frame


def _residue_index(frame: FolnerFrame, x) -> int:
    r = zq_mod1(x)
    return r.num * frame.p ** (frame.N - r.exp)


def translation_map(frame: FolnerFrame, g: GpElement) -> np.ndarray:
    """target[h] = index of g.h, or -1 when g.h leaves F."""
    if g.ctx.p != frame.p:
        raise ValueError("element and frame use different primes")
    if zq_depth(g.a) > frame.N or zq_depth(g.b) > frame.N:
        raise DepthExceeded(f"{g} is finer than depth {frame.N}")
    P, M = frame.P, frame.M
    ka, kb = _residue_index(frame, g.a), _residue_index(frame, g.b)
    k1, k2, c = np.indices((P, P, M)).reshape(3, -1)
    n1 = (ka + k1 + (g.c % P) * k2) % P
    n2 = (kb + k2) % P
    nc = c + g.c
    inside = (nc >= 0) & (nc < M)
    return np.where(inside, (n1 * P + n2) * M + nc, -1)


def compress(frame: FolnerFrame, g: GpElement) -> np.ndarray:
    target = translation_map(frame, g)
    X = np.zeros((frame.size, frame.size), dtype=np.complex128)
    cols = np.flatnonzero(target >= 0)
    X[target[cols], cols] = 1.0
    return X


def completed_perm(frame: FolnerFrame, g: GpElement) -> np.ndarray:
    """Index form of approx_homo: column h of pi_F(g) is e_{perm[h]}.

    Same ascending matching as numkernel.complete_partial_permutation.
    """
    perm = translation_map(frame, g)
    hit = np.zeros(frame.size, dtype=bool)
    hit[perm[perm >= 0]] = True
    free_cols = np.flatnonzero(perm < 0)
    perm[free_cols] = np.flatnonzero(~hit)
    return perm


def perm_matrix(perm: np.ndarray) -> np.ndarray:
    n = len(perm)
    U = np.zeros((n, n), dtype=np.complex128)
    U[perm, np.arange(n)] = 1.0
    return U


def approx_homo(frame: FolnerFrame, g: GpElement) -> np.ndarray:
    return complete_partial_permutation(compress(frame, g))


def exact_trace(frame: FolnerFrame, g: GpElement) -> Fraction:
    """Normalized trace of pi_F(g) as an exact fraction."""
    perm = completed_perm(frame, g)
    return Fraction(int(np.count_nonzero(perm == np.arange(frame.size))), frame.size)


def _perm_diff_norms(p1: np.ndarray, p2: np.ndarray, op_tol: float):
    """HS and operator norms of U1 - U2 for permutations given by index."""
    n = len(p1)
    bad = int(np.count_nonzero(p1 != p2))
    hs = float(np.sqrt(2 * bad / n))
    if bad == 0:
        return hs, NormEstimate(0.0, True, 0)

    def mv(v):
        out = np.zeros(n, dtype=np.complex128)
        out[p1] += v
        out[p2] -= v
        return out

    def rmv(w):
        return w[p1] - w[p2]

    return hs, op_norm_linear(mv, rmv, n, op_tol)


def probe_elements(ctx: ZpContext) -> list[GpElement]:
    p = ctx.p
    return [
        gp(ctx, 1, 0, 0),
        gp(ctx, 0, 1, 0),
        gp(ctx, 0, 0, 1),
        gp(ctx, Fraction(1, p), 0, 0),
        gp(ctx, 0, Fraction(1, p), 0),
    ]


def defect_table(frame: FolnerFrame, S: list[GpElement], op_tol: float = 1e-8) -> dict:
    perms = [completed_perm(frame, g) for g in S]
    traces = []
    for g in S:
        t = exact_trace(frame, g)
        traces.append(
            {"element": g.to_json(), "label": str(g), "trace": float(t), "target": 1 if in_Hp(g) else 0}
        )
    hs_rows, op_rows = [], []
    for i, g in enumerate(S):
        for j, h in enumerate(S):
            # pi_F(g) pi_F(h) sends e_x to e_{perm_g[perm_h[x]]}
            hs, est = _perm_diff_norms(completed_perm(frame, gp_mul(g, h)), perms[i][perms[j]], op_tol)
            hs_rows.append({"g": i, "h": j, "value": hs})
            op_rows.append({"g": i, "h": j, "value": est.value, "converged": est.converged})
    return {"frame": frame.to_json(), "traces": traces, "hs_defects": hs_rows, "op_defects": op_rows}


def defect_csv(table: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    fr = table["frame"]
    w.writerow(["p", "N", "M", "size", "g", "h", "hs_defect", "op_defect", "op_converged", "hs_bound"])
    bound = 2 / np.sqrt(fr["M"])
    for hs, op in zip(table["hs_defects"], table["op_defects"]):
        w.writerow(
            [fr["p"], fr["N"], fr["M"], fr["size"], hs["g"], hs["h"],
             repr(hs["value"]), repr(op["value"]), int(op["converged"]), repr(bound)]
        )
    return buf.getvalue()


def frame_invariants(frame: FolnerFrame) -> dict:
    """Exact-trace, adjoint and HS-defect checks on the probe set."""
    ctx = frame.ctx
    S = probe_elements(ctx)
    checks = []

    def record(name, ok, detail=None):
        checks.append({"name": name, "passed": bool(ok), "detail": detail})

    for g in (gp(ctx, 1, 0, 0), gp(ctx, 0, 1, 0), gp(ctx, 3, -2, 0)):
        t = exact_trace(frame, g)
        record(f"Tr pi_F{g} = 1", t == 1, str(t))
    for k in range(1, frame.N + 1):
        g = gp(ctx, Fraction(1, frame.p ** k), 0, 0)
        t = exact_trace(frame, g)
        record(f"Tr pi_F{g} = 0", t == 0, str(t))
    for c in range(1, frame.M):
        for s in (c, -c):
            g = gp(ctx, 0, 0, s)
            t = exact_trace(frame, g)
            record(f"Tr pi_F{g} = 0", t == 0, str(t))

    for g in S + [gp_mul(x, y) for x in S for y in S]:
        fwd, back = completed_perm(frame, g), completed_perm(frame, g.inv())
        record(f"pi_F{g}* = pi_F(g^-1)", np.array_equal(back[fwd], np.arange(frame.size)))

    table = defect_table(frame, S)
    bound = 2 / np.sqrt(frame.M)
    worst = max(r["value"] for r in table["hs_defects"])
    record("HS defects <= 2/sqrt(M)", worst <= bound + 1e-12, {"worst": worst, "bound": bound})
    return {
        "frame": frame.to_json(),
        "checks": checks,
        "table": table,
        "passed": all(c["passed"] for c in checks),
    }


def certificate_experiment(frame: FolnerFrame, with_table: bool = True) -> dict:
    """Measure t1 = Tr pi_F(0,1,0) and t0 = Tr pi_F(1/p,0,0) and the
    resulting lower bound on the HS distance to every genuine representation
    of the frame's dimension."""
    ctx = frame.ctx
    if frame.N < 1:
        raise DepthExceeded("frame must resolve depth 1")
    t1 = exact_trace(frame, gp(ctx, 0, 1, 0))
    t0 = exact_trace(frame, gp(ctx, Fraction(1, frame.p), 0, 0))
    report = {
        "frame": frame.to_json(),
        "t1": float(t1),
        "t0": float(t0),
        "t1_exact": str(t1),
        "t0_exact": str(t0),
        "certificate": perturbation_certificate(float(t1), float(t0)),
    }
    if with_table:
        table = defect_table(frame, probe_elements(ctx))
        report.update(traces=table["traces"], hs_defects=table["hs_defects"], op_defects=table["op_defects"])
    return report


def certificate_cross_check(frame: FolnerFrame, trials: int, seed: int, max_order: int = 30) -> dict:
    """Distance from pi_F to random genuine representations on the probe pair.

    Each sample is a direct sum of irreducibles of total dimension |F|,
    conjugated by a Haar-random unitary.
    """
    ctx = frame.ctx
    g1, g0 = gp(ctx, 0, 1, 0), gp(ctx, Fraction(1, frame.p), 0, 0)
    U1, U0 = approx_homo(frame, g1), approx_homo(frame, g0)
    rng = _rng.make_rng(seed)
    dists = []
    for _ in range(trials):
        sigma = random_direct_sum(ctx, frame.size, rng, max_order=max_order)
        dists.append(max(hs_norm(U1 - sigma(g1)), hs_norm(U0 - sigma(g0))))
    return {"trials": trials, "seed": seed, "min_distance": min(dists), "distances": dists}


def group_certificate(frame: FolnerFrame, group: str = "Gp") -> dict:
    """The G_p certificate, transported to K_p or G~_p through G_p = G_K.

    The probe pair lands in K_p (and G~_p) with (0,1,0) in H_K and
    (1/p,0,0) outside it, so the restriction argument applies verbatim.
    """
    report = certificate_experiment(frame, with_table=False)
    report["group"] = group
    if group == "Gp":
        report["embedding"] = None
        return report
    ctx = frame.ctx
    g1, g0 = gp(ctx, 0, 1, 0), gp(ctx, Fraction(1, frame.p), 0, 0)
    m1, m0 = gk_embed(g1), gk_embed(g0)
    target = "Kp" if group == "Kp" else "Gtilde"
    if group not in ("Kp", "Gtilde"):
        raise ValueError(f"unknown group {group!r}")
    report["embedding"] = "GK" if group == "Kp" else "GK < Kp < Gtilde"
    report["probes"] = {"g1": m1.to_json(), "g0": m0.to_json()}
    report["embedding_checks"] = {
        "g1_in_HK": in_HK(m1),
        "g0_in_HK": in_HK(m0),
        "in_group": m1.fits(target) and m0.fits(target),
    }
    return report
