"""Command-line front end.

Every subcommand writes one report (JSON by default) that embeds the
resolved configuration and the package version.  Exit codes: 0 success,
1 an invariant was violated, 2 usage error, 3 a module error (for example a
graph too large to materialize).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import __version__
from ._accel import get_backend, set_threads
from .errors import DegreeMismatch, NotPrime, ReducibleModulus, WellmixError

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3
RANDOMIZED = {"mixing-fuzz", "gap-explore"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    p: int
    k: int = 1
    modulus: list[int] | None = None
    d: int = 1
    m: int = 0
    seed: int | None = None
    eps: float = 0.01
    delta: float = 1.0
    out: str | None = None
    format: str = "json"
    threads: int | None = None
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.d < 0 or self.m < 0:
            raise UsageError("--d and --m must be nonnegative")
        if self.eps < 0 or self.delta < 0:
            raise UsageError("--eps and --delta must be nonnegative")
        if self.format not in ("json", "csv"):
            raise UsageError("--format must be json or csv")
        if self.subcommand in RANDOMIZED and self.seed is None:
            if self.subcommand != "gap-explore" or self.options.get("count", 0) > 0:
                raise UsageError(f"{self.subcommand} needs an explicit --seed")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("threads")
        return d


@dataclass
class Outcome:
    result: dict
    ok: bool = True
    csv_rows: list[list] | None = None
    csv_text: str | None = None


def _graph(cfg: RunConfig):
    from .graph import GraphSpec
    from .field import make_field

    try:
        fld = make_field(cfg.p, cfg.k, cfg.modulus)
    except (NotPrime, DegreeMismatch, ReducibleModulus, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return GraphSpec(fld, cfg.d, cfg.m)


# -- subcommands --------------------------------------------------------------

def cmd_graph(cfg: RunConfig) -> Outcome:
    from .graph import degrees, edges_csv

    g = _graph(cfg)
    base = g.base()
    left, right = degrees(base)
    bireg = bool((left == g.left_degree).all() and (right == g.right_degree).all())
    handshake = int(left.sum()) == int(right.sum()) == g.n_edges
    result = g.to_dict() | {
        "degrees": {"D_L": g.left_degree, "D_R": g.right_degree,
                    "biregular": bireg, "handshake": handshake},
    }
    return Outcome(result, bireg and handshake, csv_text=edges_csv(base))


def cmd_neighborhood(cfg: RunConfig) -> Outcome:
    from .graph import common_neighborhood_max

    g = _graph(cfg).base()
    cn = common_neighborhood_max(g)
    a, b = cn.witness
    result = {"max": cn.max, "bound": g.d, "witness": [list(a.coeffs), list(b.coeffs)]}
    return Outcome(result, cn.max <= g.d,
                   [["max", "bound", "witness_a", "witness_b"],
                    [cn.max, g.d, g.poly_id(a), g.poly_id(b)]])


def cmd_spectrum(cfg: RunConfig) -> Outcome:
    from .spectral import amplified_lambda2, build_mmt, expander_check, matrix_csv

    g = _graph(cfg)
    chk = expander_check(g.base(), cfg.options.get("tol", 1e-9))
    result = chk.to_dict()
    result["amplified_lambda2"] = amplified_lambda2(chk.report.lambda2, g.m)
    dump = cfg.options.get("dump_matrix")
    if dump:
        with open(dump, "w", newline="") as fh:
            fh.write(matrix_csv(build_mmt(g.base())))
    ok = chk.expander_ok and chk.lambda1_matches and chk.lambda2_matches and chk.closed_form_ok is not False
    return Outcome(result, ok, csv_text=chk.report.to_csv())


def cmd_mixing_fuzz(cfg: RunConfig) -> Outcome:
    from .mixing import mixing_fuzz

    g = _graph(cfg)
    summary = mixing_fuzz(g, cfg.options.get("trials", 10_000), cfg.seed)
    return Outcome(summary.to_dict(), summary.violations == 0, csv_text=summary.to_csv())


def cmd_biclique(cfg: RunConfig) -> Outcome:
    from .mixing import exhaustive_biclique_search

    g = _graph(cfg).base()
    min_a, min_b = cfg.options.get("min_a", 2), cfg.options.get("min_b", 2)
    found = exhaustive_biclique_search(g, min_a, min_b)
    result = {"min_a": min_a, "min_b": min_b, "found": found is not None,
              "biclique": found.to_dict() if found else None}
    rows = [["a", "b", "left", "right"]]
    if found:
        rows.append([found.a, found.b, " ".join(map(str, found.left)), " ".join(map(str, found.right))])
    return Outcome(result, True, rows)


def cmd_entropy_profile(cfg: RunConfig) -> Outcome:
    from .info import edge_profile

    g = _graph(cfg).base()
    prof = edge_profile(g)
    n, d = prof.values["n"], g.d
    expected = {"H_X": 2 * n, "H_Y": (d + 1) * n, "H_XY": (d + 2) * n, "I": n}
    ok = all(abs(prof.values[k] - v) <= 1e-10 for k, v in expected.items())
    result = prof.to_dict() | {"expected": expected}
    rows = [["quantity", "value", "expected"]]
    rows += [[k, repr(prof.values[k]), repr(v)] for k, v in expected.items()]
    return Outcome(result, ok, rows)


def cmd_ska(cfg: RunConfig) -> Outcome:
    from .ska import audit_protocol, builtin_protocols, protocol_from_json

    g = _graph(cfg).base()
    name, desc = cfg.options.get("protocol"), cfg.options.get("protocol_json")
    if desc:
        text = desc
        if not desc.lstrip().startswith("{"):
            with open(desc) as fh:
                text = fh.read()
        try:
            proto = protocol_from_json(g, text)
        except (ValueError, TypeError) as exc:
            raise UsageError(str(exc)) from exc
    else:
        protos = builtin_protocols(g)
        if name not in protos:
            raise UsageError(f"unknown protocol {name!r}; choose from {sorted(protos)}")
        proto = protos[name]
    aud = audit_protocol(g, proto, cfg.eps, cfg.delta)
    result = aud.to_dict() | {"protocol": proto.name}
    rows = [["x", "y", "pub", "r_a", "r_b", "bits_A", "bits_B"]]
    rows += [[g.point_id(b.x), g.poly_id(b.y), b.pub, b.r_a, b.r_b, b.bits_a, b.bits_b]
             for b in aud.branches]
    return Outcome(result, aud.verdict == "PASS" and aud.triple_info_T >= -1e-10, rows)


def cmd_muchnik_search(cfg: RunConfig) -> Outcome:
    from .crypto_lab import muchnik_exhaustive_search

    g = _graph(cfg).base()
    rep = muchnik_exhaustive_search(g, cfg.options.get("max_alphabet", 4))
    rows = [["a", "total", "raw_total", "useful_only", "useless_only", "both", "neither"]]
    rows += [[r.a, r.total, r.raw_total, r.useful_only, r.useless_only, r.both, r.neither]
             for r in rep.alphabets]
    return Outcome(rep.to_dict(), True, rows)


def cmd_gap_explore(cfg: RunConfig) -> Outcome:
    from .crypto_lab import inequality_gap, standard_gap_functions

    g = _graph(cfg).base()
    rep = inequality_gap(g, standard_gap_functions(), cfg.options.get("count", 1000), cfg.seed)
    std = rep.rows[:3]
    ok = all(abs(r.gap) <= 1e-10 for r in std)
    result = rep.to_dict() | {"standard": {r.w_id: r.gap for r in std}}
    return Outcome(result, ok, csv_text=rep.to_csv())


COMMANDS: dict[str, Callable[[RunConfig], Outcome]] = {
    "graph": cmd_graph,
    "neighborhood": cmd_neighborhood,
    "spectrum": cmd_spectrum,
    "mixing-fuzz": cmd_mixing_fuzz,
    "biclique": cmd_biclique,
    "entropy-profile": cmd_entropy_profile,
    "ska": cmd_ska,
    "muchnik-search": cmd_muchnik_search,
    "gap-explore": cmd_gap_explore,
}


# -- plumbing -----------------------------------------------------------------

def _modulus(text: str) -> list[int]:
    try:
        return [int(c) for c in text.split(",") if c.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"modulus must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="field characteristic")
    common.add_argument("--k", type=int, default=1, help="extension degree")
    common.add_argument("--modulus", type=_modulus, default=None,
                        help="modulus coefficients, lowest degree first (e.g. 1,1,1)")
    common.add_argument("--d", type=int, default=1, help="polynomial degree bound")
    common.add_argument("--m", type=int, default=0, help="private-randomness amplification bits")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--eps", type=float, default=0.01)
    common.add_argument("--delta", type=float, default=1.0)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=None,
                        help="worker cap (falls back to WELLMIX_THREADS)")

    parser = argparse.ArgumentParser(prog="wellmix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wellmix {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    sub.add_parser("graph", parents=[common], help="vertex/edge counts and degree checks")
    sub.add_parser("neighborhood", parents=[common], help="maximum common neighbourhood")
    sp = sub.add_parser("spectrum", parents=[common], help="spectrum and expander check")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--dump-matrix", default=None, help="write M M^T as dense CSV")
    mf = sub.add_parser("mixing-fuzz", parents=[common], help="seeded random mixing-bound trials")
    mf.add_argument("--trials", type=int, default=10_000)
    bc = sub.add_parser("biclique", parents=[common], help="largest complete bipartite subgraph")
    bc.add_argument("--min-a", type=int, default=2)
    bc.add_argument("--min-b", type=int, default=2)
    sub.add_parser("entropy-profile", parents=[common], help="entropy profile of a random edge")
    sk = sub.add_parser("ska", parents=[common], help="execute and audit a key-agreement protocol")
    group = sk.add_mutually_exclusive_group(required=True)
    group.add_argument("--protocol", help="built-in protocol name")
    group.add_argument("--protocol-json", help="JSON description (inline or a file path)")
    ms = sub.add_parser("muchnik-search", parents=[common], help="exhaustive encoder classification")
    ms.add_argument("--max-alphabet", type=int, default=4)
    ge = sub.add_parser("gap-explore", parents=[common], help="information-inequality gaps")
    ge.add_argument("--count", type=int, default=1000)
    return parser


_OPTION_KEYS = ("tol", "dump_matrix", "trials", "min_a", "min_b", "protocol",
                "protocol_json", "max_alphabet", "count")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    options = {k: getattr(ns, k) for k in _OPTION_KEYS if getattr(ns, k, None) is not None}
    return RunConfig(ns.subcommand, ns.p, ns.k, ns.modulus, ns.d, ns.m, ns.seed, ns.eps,
                     ns.delta, ns.out, ns.format, ns.threads, options)


def render(cfg: RunConfig, outcome: Outcome) -> str:
    header = {"artifact": "wellmix", "version": __version__, "config": cfg.to_dict()}
    if cfg.format == "json":
        doc = header | {"invariants_ok": outcome.ok, "result": outcome.result}
        return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"
    text = outcome.csv_text
    if text is None:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(outcome.csv_rows or [])
        text = buf.getvalue()
    return f"# {json.dumps(header | {'invariants_ok': outcome.ok}, sort_keys=True)}\n" + text


def dispatch(cfg: RunConfig) -> tuple[int, str]:
    """Run one configured subcommand; returns ``(exit_code, report_text)``."""
    cfg.validate()
    set_threads(cfg.threads)
    outcome = COMMANDS[cfg.subcommand](cfg)
    return (EXIT_OK if outcome.ok else EXIT_VIOLATION), render(cfg, outcome)


def _error_record(kind: str, exc: BaseException) -> str:
    return json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc),
                       "version": __version__, "backend": get_backend()}, sort_keys=True)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = config_from_args(ns)
    try:
        code, text = dispatch(cfg)
    except UsageError as exc:
        print(_error_record("usage", exc), file=sys.stderr)
        return EXIT_USAGE
    except WellmixError as exc:
        print(_error_record("module", exc), file=sys.stderr)
        return EXIT_ERROR
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
