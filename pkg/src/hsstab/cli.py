"""
Command-line harness.

    hsstab verify {exact,groups,words,chars,reps} [--p P] [--seed S] [--trials T]
    hsstab folner [--p P] [--N N] [--M 2,4,8,16] [--cap C]
    hsstab certificate --group {Gp,Kp,Gtilde} [--p P] [--N N] [--M M]

Reports are JSON (``"schema": 1``, sorted keys, no timestamps) or CSV,
written to ``--out`` or stdout.  A one-line verdict goes to stderr.
Exit codes: 0 all checks passed, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, dataclass, field

from .errors import FrameTooLarge, HSStabError
from .exact import ZpContext, is_prime
from .folner import (
    DEFAULT_CAP,
    certificate_cross_check,
    defect_csv,
    frame_build,
    frame_invariants,
    group_certificate,
)
from .suites import SUITES, suite_reps, run_suite

log = logging.getLogger("hsstab")

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    p: int = 2
    seed: int = 0
    trials: int = 1000
    tolerance: float = 1e-9
    N: int = 2
    M: list = field(default_factory=lambda: [2, 4, 8, 16])
    cap: int = DEFAULT_CAP
    out: str | None = None
    format: str = "json"

    def validate(self):
        if not is_prime(self.p):
            raise ValueError(f"--p must be prime, got {self.p}")
        if self.trials < 1:
            raise ValueError("--trials must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("--tolerance must be positive")
        if self.N < 1 or not self.M or min(self.M) < 1:
            raise ValueError("--N and every --M must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("--seed must be a 64-bit unsigned integer")


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _m_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="prime (default 2)")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    common.add_argument("--tolerance", type=float, default=1e-9, help="float assertion tolerance")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hsstab", description=__doc__.split("\n\n")[0].strip())
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run a module's invariant suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--trials", type=int, default=1000)

    f = sub.add_parser("folner", parents=[common], help="Følner frame sweep")
    f.add_argument("--N", type=int, default=2, help="Prüfer depth")
    f.add_argument("--M", type=_m_list, default=[2, 4, 8, 16], help="comma-separated windows")
    f.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum frame size")
    f.add_argument("--trials", type=int, default=1, help=argparse.SUPPRESS)

    c = sub.add_parser("certificate", parents=[common], help="non-perturbability certificate")
    c.add_argument("--group", choices=("Gp", "Kp", "Gtilde"), required=True)
    c.add_argument("--N", type=int, default=1)
    c.add_argument("--M", type=_m_list, default=[4], help="window (first value is used)")
    c.add_argument("--cap", type=int, default=DEFAULT_CAP)
    c.add_argument("--trials", type=int, default=100, help="random representations in the cross-check")
    return parser


def _config(args) -> RunConfig:
    kw = {k: getattr(args, k) for k in ("p", "seed", "trials", "tolerance", "out", "format") if hasattr(args, k)}
    for k in ("N", "M", "cap"):
        if hasattr(args, k):
            kw[k] = getattr(args, k)
    return RunConfig(**kw)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_verify(suite: str, cfg: RunConfig) -> tuple[dict, str]:
    ctx = ZpContext(cfg.p)
    if suite == "reps":
        report = suite_reps(ctx, cfg.seed, cfg.trials, tol=min(cfg.tolerance, 1e-10))
    else:
        report = run_suite(suite, ctx, cfg.seed, cfg.trials)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "p", "seed", "check", "cases", "passed"])
    for chk in report["checks"]:
        w.writerow([suite, cfg.p, cfg.seed, chk["name"], chk["cases"], int(chk["passed"])])
    return report, buf.getvalue()


def cmd_folner(cfg: RunConfig) -> tuple[dict, str]:
    frames = [frame_build(cfg.p, cfg.N, M, cfg.cap) for M in cfg.M]
    rows = []
    csv_parts = []
    for fr in frames:
        inv = frame_invariants(fr)
        cert = group_certificate(fr, "Gp")
        ok = inv["passed"] and abs(cert["certificate"] - 1 / 3) <= cfg.tolerance
        rows.append({
            "frame": inv["frame"],
            "traces": inv["table"]["traces"],
            "hs_defects": inv["table"]["hs_defects"],
            "op_defects": inv["table"]["op_defects"],
            "certificate": cert["certificate"],
            "t1": cert["t1_exact"],
            "t0": cert["t0_exact"],
            "checks": inv["checks"],
            "passed": ok,
        })
        body = defect_csv(inv["table"])
        csv_parts.append(body if not csv_parts else body.split("\n", 1)[1])
    worst = [max(r["value"] for r in row["hs_defects"]) for row in rows]
    order = sorted(range(len(rows)), key=lambda i: cfg.M[i])
    monotone = all(worst[order[k + 1]] <= worst[order[k]] + cfg.tolerance for k in range(len(order) - 1))
    report = {
        "frames": rows,
        "worst_hs_defect": worst,
        "hs_nonincreasing": monotone,
        "passed": monotone and all(r["passed"] for r in rows),
    }
    return report, "".join(csv_parts)


def cmd_certificate(group: str, cfg: RunConfig) -> tuple[dict, str]:
    fr = frame_build(cfg.p, cfg.N, cfg.M[0], cfg.cap)
    report = group_certificate(fr, group)
    cross = certificate_cross_check(fr, cfg.trials, cfg.seed)
    report["cross_check"] = {"trials": cross["trials"], "seed": cross["seed"], "min_distance": cross["min_distance"]}
    ok = abs(report["certificate"] - 1 / 3) <= cfg.tolerance
    ok = ok and cross["min_distance"] >= report["certificate"] - cfg.tolerance
    emb = report.get("embedding_checks")
    if emb is not None:
        ok = ok and emb["g1_in_HK"] and not emb["g0_in_HK"] and emb["in_group"]
    report["passed"] = bool(ok)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["group", "p", "N", "M", "size", "t1", "t0", "certificate", "embedding", "min_distance", "passed"])
    f = report["frame"]
    w.writerow([group, f["p"], f["N"], f["M"], f["size"], report["t1_exact"], report["t0_exact"],
                repr(report["certificate"]), report["embedding"] or "", repr(cross["min_distance"]), int(ok)])
    return report, buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on malformed flags
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = _config(args)
        cfg.validate()
    except ValueError as e:
        print(f"hsstab: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "verify":
            report, table = cmd_verify(args.suite, cfg)
        elif args.command == "folner":
            report, table = cmd_folner(cfg)
        else:
            report, table = cmd_certificate(args.group, cfg)
    except FrameTooLarge as e:
        print(f"hsstab: error: {e} (raise --cap to allow it)", file=sys.stderr)
        return EXIT_USAGE
    except HSStabError as e:
        print(f"hsstab: error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE

    cfg_json = asdict(cfg)
    cfg_json.pop("out")
    report = {"schema": SCHEMA, "command": args.command, "config": cfg_json, **report}
    if args.command == "verify":
        report["config"]["suite"] = args.suite
    if args.command == "certificate":
        report["config"]["group"] = args.group
    text = dumps(report) if cfg.format == "json" else table
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    verdict = "PASS" if report["passed"] else "FAIL"
    print(f"{verdict} {args.command} p={cfg.p}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
