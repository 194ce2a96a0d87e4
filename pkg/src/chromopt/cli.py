"""Command-line interface: ``chromopt {solve,verify,construct,count,search,report}``.

Exit codes: 0 success, 1 usage or domain error, 2 oracle inconsistency,
3 verification failure.  ``--json PATH`` writes the full report
(``-`` for stdout); reports are byte-identical for identical config and seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from chromopt import suites
from chromopt._validation import DomainError, InconsistencyError
from chromopt._version import __version__
from chromopt.analysis import closed_form_value
from chromopt.coloring import (
    chromatic_polynomial,
    count_colorings,
    count_colorings_multipartite,
    fl_upper_bound,
    fl_upper_bound_exact,
)
from chromopt.config import RunConfig, load_config
from chromopt.extremal import search_extremal
from chromopt.graphs import (
    construct_g_alpha,
    edge_count_bound_check,
    is_turan,
    multipartite_parts,
    read_graph,
    turan,
    write_graph,
)
from chromopt.solver import AscentConfig, analytic_opt, numeric_opt

EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT, EXIT_FAILED = 0, 1, 2, 3
SOLVE_GAMMAS = (0.24, 0.245, 0.249, 0.25)
CONSTRUCT_NS = (9, 10, 50, 200)
SEARCH_INSTANCES = ((4, 4, 3), (4, 4, 5), (5, 6, 5), (6, 9, 5), (7, 12, 5))


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _ascent(cfg: RunConfig) -> AscentConfig:
    return AscentConfig(n_starts=cfg.budgets["ascent_starts"], step=cfg.ascent_step,
                        max_iter=cfg.budgets["ascent_max_iter"], seed=cfg.seed)


def _envelope(command: str, cfg: RunConfig, result) -> dict:
    return {"command": command, "version": f"chromopt {__version__}", "config": cfg.to_json(), "result": result}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


# -- subcommands -----------------------------------------------------------------------------


def solve_payload(q: int, gamma: float, method: str, cfg: RunConfig) -> tuple[int, dict, str]:
    tol = cfg.tolerances["analytic"]
    if method == "analytic":
        rep = analytic_opt(q, gamma, tuple(cfg.gamma_window))
        return EXIT_OK, rep.to_json(), f"analytic optimum {rep.optimum_value:.10f}"
    if method == "numeric":
        rep = numeric_opt(q, gamma, _ascent(cfg), oracle_tol=cfg.tolerances["oracle"], n_jobs=cfg.workers,
                          analytic_window=tuple(cfg.gamma_window))
        return EXIT_OK, rep.to_json(), f"numeric optimum {rep.optimum_value:.10f}"
    ana = analytic_opt(q, gamma, tuple(cfg.gamma_window))
    num = numeric_opt(q, gamma, _ascent(cfg), oracle_tol=cfg.tolerances["oracle"], n_jobs=cfg.workers,
                      analytic_window=tuple(cfg.gamma_window))
    residual = abs(num.optimum_value - ana.optimum_value)
    ok = residual <= tol
    payload = {"analytic": ana.to_json(), "numeric": num.to_json(), "residual": residual,
               "tolerance": tol, "within_tolerance": ok}
    text = f"analytic {ana.optimum_value:.10f}  numeric {num.optimum_value:.10f}  residual {residual:.3e}"
    return (EXIT_OK if ok else EXIT_FAILED), payload, text


def cmd_solve(args, cfg):
    return solve_payload(args.q, args.gamma, args.method, cfg)


def cmd_verify(args, cfg):
    gammas = None
    if args.gamma_window is not None:
        lo, hi = args.gamma_window
        if not (0.0 <= lo < hi <= 0.25):
            raise DomainError(f"--gamma-window needs 0 <= lo < hi <= 1/4, got {lo} {hi}")
        gammas = suites.gamma_grid(lo, hi, cfg.budgets["gamma_grid"])
    checks = args.check or None
    try:
        records = suites.run_suite(cfg, checks=checks, gammas=gammas, qs=args.q)
    except ValueError as exc:
        raise DomainError(str(exc)) from exc
    rows = [r.to_json() for r in records]
    summary = suites.summarize(records)
    failed = [r for r in rows if not r["satisfied"]]
    for r in failed:
        print(f"FAILED {json.dumps(r, sort_keys=True)}", file=sys.stderr)
    text = f"{summary['records']} records, {summary['failed']} failed"
    return (EXIT_FAILED if failed else EXIT_OK), {"records": rows, "summary": summary}, text


def construct_payload(q, gamma, n, method, cfg):
    if method == "analytic":
        rep = analytic_opt(q, gamma, tuple(cfg.gamma_window))
    else:
        rep = numeric_opt(q, gamma, _ascent(cfg), oracle_tol=cfg.tolerances["oracle"], n_jobs=cfg.workers)
    g, blocks = construct_g_alpha(rep.optimizer, n)
    bound = edge_count_bound_check(rep.optimizer, n)
    is_turan_2 = n >= 2 and is_turan(g, 2)
    payload = {"alpha": rep.optimizer.to_json(), "graph": g.to_json(), "blocks": blocks.to_json(),
               "edge_bound": bound.to_json(), "is_turan_2": is_turan_2, "optimum_value": rep.optimum_value}
    return payload, g, bound, is_turan_2


def cmd_construct(args, cfg):
    payload, g, bound, is_turan = construct_payload(args.q, args.gamma, args.n, args.method, cfg)
    if args.graph_out:
        write_graph(g, args.graph_out)
    text = g.to_text().rstrip("\n")
    return (EXIT_OK if bound.satisfied else EXIT_FAILED), payload, text


def cmd_count(args, cfg):
    g = read_graph(args.graph)
    count = count_colorings(g, args.q, args.method)
    payload = {"graph": {"n": g.n, "m": g.m}, "q": args.q, "method": args.method, "count": count}
    lines = [str(count)]
    status = EXIT_OK
    if args.bound:
        exact = fl_upper_bound_exact(g.n, g.m, args.q)
        bound = fl_upper_bound(g.n, g.m, args.q)
        payload["bound"] = bound if math.isfinite(bound) else None
        payload["bound_exact"] = f"{exact.numerator}/{exact.denominator}"
        payload["bound_holds"] = count <= exact
        lines.append(repr(bound))
        if not payload["bound_holds"]:
            status = EXIT_FAILED
    return status, payload, "\n".join(lines)


def cmd_search(args, cfg):
    if args.n >= 8 and not args.force:
        raise DomainError("n = 8 needs --force (labeled enumeration without isomorphism reduction)")
    res = search_extremal(args.n, args.m, args.q, workers=cfg.workers, dedup=not args.force)
    text = (f"max count {res.max_count} over {res.graphs_examined} graphs; "
            f"{len(res.maximizers)} maximizer(s); T_2 unique: {res.turan_is_unique_max}")
    return EXIT_OK, res.to_json(), text


def report_payload(cfg: RunConfig) -> tuple[int, dict]:
    """Bundle of every acceptance-style computation, in a fixed order."""
    status = EXIT_OK
    solve_rows = []
    for q in cfg.verify_q:
        if q < 5 or q % 2 == 0:
            continue
        for gamma in SOLVE_GAMMAS:
            try:
                code, payload, _ = solve_payload(q, gamma, "both", cfg)
            except InconsistencyError as exc:
                if status == EXIT_OK:
                    status = EXIT_INCONSISTENT
                solve_rows.append({"q": q, "gamma": gamma, "error": str(exc)})
                continue
            if code != EXIT_OK and status == EXIT_OK:
                status = code
            solve_rows.append({"q": q, "gamma": gamma, "residual": payload["residual"],
                               "within_tolerance": payload["within_tolerance"],
                               "numeric_value": payload["numeric"]["optimum_value"],
                               "analytic_value": payload["analytic"]["optimum_value"],
                               "numeric_support": payload["numeric"]["support_class"]})
    records = suites.run_suite(cfg)
    if not all(r.satisfied for r in records) and status == EXIT_OK:
        status = EXIT_FAILED
    construct_rows = []
    for n in CONSTRUCT_NS:
        payload, g, bound, is_turan = construct_payload(5, 0.25, n, "analytic", cfg)
        construct_rows.append({"n": n, "m": g.m, "is_turan_2": is_turan, "edge_bound": bound.to_json()})
    search_rows = [search_extremal(n, m, q, workers=cfg.workers).to_json() for n, m, q in SEARCH_INSTANCES]
    counting_rows = []
    for n in range(2, 7):
        g = turan(2, n)
        for q in range(2, 7):
            counting_rows.append({"n": n, "q": q, "poly": chromatic_polynomial(g)(q),
                                  "multipartite": count_colorings_multipartite(multipartite_parts(g), q)})
    result = {
        "solve": solve_rows,
        "verify": {"records": [r.to_json() for r in records], "summary": suites.summarize(records)},
        "construct": construct_rows,
        "search": search_rows,
        "counting": counting_rows,
        "closed_form": {str(q): closed_form_value(q, 0.25) for q in (5, 7, 9)},
    }
    return status, result


def cmd_report(args, cfg):
    status, result = report_payload(cfg)
    text = f"report status {status}"
    return status, result, text


# -- parsing -------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat TOML config file")
    common.add_argument("--seed", type=int, help="random seed (overrides CHROMOPT_SEED and the config file)")
    common.add_argument("--workers", type=int, help="worker processes")
    common.add_argument("--json", dest="json_path", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--print-config", action="store_true", help="print the effective config and exit")
    common.add_argument("--tol", nargs=2, action="append", metavar=("NAME", "VALUE"),
                        help="override a named tolerance, e.g. --tol inequality 1e-9")
    common.add_argument("--budget", nargs=2, action="append", metavar=("NAME", "VALUE"),
                        help="override a named integer budget, e.g. --budget samples 1000")

    p = _Parser(prog="chromopt", description="Colorings at fixed edge density: solver, checks and graph tools.")
    p.add_argument("--version", action="version", version=f"chromopt {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", parents=[common], help="optimum of the weighted-subset program")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--method", choices=("analytic", "numeric", "both"), default="both")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", parents=[common], help="inequality and bound checks")
    v.add_argument("--check", action="append", choices=suites.CHECK_NAMES, help="run only these checks")
    v.add_argument("--gamma-window", type=float, nargs=2, metavar=("LO", "HI"),
                   help="replace the configured gammas by an even grid on (LO, HI]")
    v.add_argument("--q", type=int, action="append", help="q values for the sampled checks")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("construct", parents=[common], help="blow-up graph of the optimum")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--gamma", type=float, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--method", choices=("analytic", "numeric"), default="analytic")
    c.add_argument("--graph-out", help="also write the graph (edge-list text, or JSON by suffix)")
    c.set_defaults(func=cmd_construct)

    k = sub.add_parser("count", parents=[common], help="exact number of q-colorings of a graph file")
    k.add_argument("--graph", required=True)
    k.add_argument("--q", type=int, required=True)
    k.add_argument("--method", choices=("auto", "brute", "poly", "multipartite"), default="auto")
    k.add_argument("--bound", action="store_true", help="also print the edge-count upper bound")
    k.set_defaults(func=cmd_count)

    e = sub.add_parser("search", parents=[common], help="graphs with the most q-colorings among (n, m)-graphs")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--m", type=int, required=True)
    e.add_argument("--q", type=int, required=True)
    e.add_argument("--force", action="store_true", help="allow n = 8 via labeled enumeration")
    e.set_defaults(func=cmd_search)

    r = sub.add_parser("report", parents=[common], help="run the full bundle of computations")
    r.set_defaults(func=cmd_report)
    return p


def _overrides(args) -> dict:
    out = {"seed": args.seed, "workers": args.workers}
    for name, value in args.tol or []:
        out[f"tol_{name}"] = float(value)
    for name, value in args.budget or []:
        try:
            out[f"budget_{name}"] = int(value)
        except ValueError as exc:
            raise DomainError(f"budget {name} must be an integer") from exc
    return out


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config, _overrides(args))
        if args.print_config:
            sys.stdout.write(cfg.to_toml())
            return EXIT_OK
        status, payload, text = args.func(args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    out_path = args.json_path or cfg.output_path
    doc = dumps(_envelope(args.command, cfg, payload))
    if out_path == "-":
        sys.stdout.write(doc)
    else:
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(doc)
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
