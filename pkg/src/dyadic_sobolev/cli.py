"""Command-line front end.

Exit status: 0 success, 1 identity failure, 2 bad arguments or input,
3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys

from .capacity import DEFAULT_TOL, DyadicSet, capacity
from .carleson import (
    OPERATOR_NAMES,
    CarlesonSequence,
    ExactDepthError,
    bmo_s_norm,
    embedding_constant,
    named_operator,
    operator_norm_hs,
)
from .config import COMMANDS, ConfigError, RunConfig
from .dyadic import HaarCoeffs, StepFunction, haar_synthesize
from .norms import norm_report
from .suites import CSV_COLUMNS, SUITES, THEOREM_SUITES, SuiteOptions, rows_to_csv, run_suite, summarize
from .verification import run_identities

EXIT_OK, EXIT_IDENTITY, EXIT_PARSE, EXIT_NONCONVERGED = 0, 1, 2, 3

_EPILOG = (
    "suite reports are CSV with columns " + ", ".join(CSV_COLUMNS) + "; "
    "seed is the per-sample 64-bit seed and depth the sample depth. "
    "A JSON summary (min/median/max per suite, s, depth, statistic) is written "
    "next to --output as <output>.summary.json, or to stderr. "
    "DYADIC_SOBOLEV_JOBS overrides --jobs."
)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file of settings; flags take precedence")
    common.add_argument("--s", dest="s_values", type=float, nargs="+", metavar="S", help="smoothness values in (0, 1)")
    common.add_argument("--depth", type=int, help="sample or operator depth (default 8)")
    common.add_argument("--solve-depth", type=int, help="capacity trial-function depth (default 12)")
    common.add_argument("--seed", type=int, help="base seed (default 42)")
    common.add_argument("--trials", type=int, help="samples per (s, depth) (default 200)")
    common.add_argument("--mode", choices=("auto", "exact", "heuristic"), help="Carleson-norm search")
    common.add_argument("--allow-depth-4", action="store_true", help="permit exact search at Carleson depth 4")
    common.add_argument("--output", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--jobs", type=int, help="worker processes (default: logical CPUs)")
    common.add_argument("--tol", type=float)
    common.add_argument("--max-iters", type=int)
    common.add_argument("--input", help="JSON input file; '-' or absent reads stdin")

    parser = argparse.ArgumentParser(
        prog="dyadic-sobolev",
        description="Dyadic fractional Sobolev norms, capacities and operator bounds.",
        epilog=_EPILOG,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the exact-identity checks", epilog=_EPILOG)
    sub.add_parser("norm", parents=[common], help="norms of a step function (JSON input)")
    cap = sub.add_parser("capacity", parents=[common], help="capacity of a DyadicSet")
    cap.add_argument("--set", default=argparse.SUPPRESS, help="DyadicSet JSON inline")
    sub.add_parser("bmos", parents=[common], help="BMO^s norm of a symbol step function")
    emb = sub.add_parser("embed", parents=[common], help="Carleson embedding constant")
    emb.add_argument("--mu", default=argparse.SUPPRESS, dest="input", help="CarlesonSequence JSON file")
    op = sub.add_parser("opnorm", parents=[common], help="operator norm on H^s")
    op.add_argument("--op", default=argparse.SUPPRESS, choices=OPERATOR_NAMES, help="operator (default paraproduct)")
    suite = sub.add_parser("suite", parents=[common], help="sampling experiments", epilog=_EPILOG)
    suite.add_argument("--suite", default=argparse.SUPPRESS, dest="suites", nargs="+", choices=SUITES, help="default: the theorem suites")
    suite.add_argument("--depths", default=argparse.SUPPRESS, type=int, nargs="+", help="sample depths (default: --depth)")
    suite.add_argument("--alpha", default=argparse.SUPPRESS, type=float, help="coefficient decay exponent (default 0)")
    return parser


def build_config(argv) -> RunConfig:
    ns = vars(_parser().parse_args(argv))
    config_path = ns.pop("config", None)
    base = RunConfig()
    if config_path:
        base = base.merged(RunConfig.from_file(config_path))
    return base.merged(ns).validate()


def _read_json(cfg: RunConfig, inline: str | None = None, flag: str = "--input"):
    try:
        if inline is not None:
            return json.loads(inline)
        if cfg.input in (None, "-"):
            return json.load(sys.stdin)
        with open(cfg.input) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(flag, str(exc)) from exc


def _step_input(cfg: RunConfig) -> StepFunction:
    obj = _read_json(cfg)
    try:
        if isinstance(obj, dict) and "coeffs" in obj:
            return haar_synthesize(HaarCoeffs.from_json(obj))
        return StepFunction.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("--input", f"not a step function: {exc}") from exc


def _emit(cfg: RunConfig, payloads: list[dict]) -> None:
    body = payloads[0] if len(payloads) == 1 else payloads
    text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    _write(cfg.output, text)


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _verify(cfg: RunConfig) -> int:
    results = run_identities(cfg.depth, cfg.seed, cfg.trials)
    if cfg.format == "csv":
        lines = ["identity,max_residual,tol,passed,depth,seed"]
        lines += [f"{r.identity},{r.max_residual!r},{r.tol!r},{r.passed},{r.depth},{r.seed}" for r in results]
        _write(cfg.output, "\n".join(lines) + "\n")
    else:
        _write(cfg.output, json.dumps([r.to_json() for r in results], indent=2) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_IDENTITY


def _norm(cfg: RunConfig) -> int:
    f = _step_input(cfg)
    _emit(cfg, [norm_report(f, s).to_json() for s in cfg.s_values])
    return EXIT_OK


def _capacity(cfg: RunConfig) -> int:
    obj = _read_json(cfg, cfg.set, "--set" if cfg.set is not None else "--input")
    try:
        E = DyadicSet.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("--set", f"not a DyadicSet: {exc}") from exc
    if cfg.solve_depth < E.depth:
        raise ConfigError("--solve-depth", f"must be at least the set depth {E.depth}")
    tol = DEFAULT_TOL if cfg.tol is None else cfg.tol
    ests = [capacity(E, s, cfg.solve_depth, tol, cfg.max_iters) for s in cfg.s_values]
    _emit(cfg, [{"s": s, **e.to_json()} for s, e in zip(cfg.s_values, ests)])
    return EXIT_OK if all(e.converged for e in ests) else EXIT_NONCONVERGED


def _mode(cfg: RunConfig, carleson_depth: int) -> str:
    if cfg.mode != "auto":
        return cfg.mode
    return "exact" if carleson_depth <= (4 if cfg.allow_depth_4 else 3) else "heuristic"


def _bmos(cfg: RunConfig) -> int:
    b = _step_input(cfg)
    out = []
    for s in cfg.s_values:
        mode = _mode(cfg, max(b.depth - 1, 0))
        try:
            val = bmo_s_norm(b, s, mode, allow_depth_4=cfg.allow_depth_4)
        except ExactDepthError as exc:
            raise ConfigError("--mode", str(exc)) from exc
        out.append((val.cap.converged, {"s": s, "mode": mode, "bmo_s": float(val.ratio) ** 0.5, **val.to_json()}))
    _emit(cfg, [o for _, o in out])
    return EXIT_OK if all(ok for ok, _ in out) else EXIT_NONCONVERGED


def _embed(cfg: RunConfig) -> int:
    try:
        mu = CarlesonSequence.from_json(_read_json(cfg, flag="--mu"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("--mu", f"not a Carleson sequence: {exc}") from exc
    kw = {} if cfg.max_iters is None else {"max_iters": cfg.max_iters}
    if cfg.tol is not None:
        kw["tol"] = cfg.tol
    ests = [embedding_constant(mu, s, **kw) for s in cfg.s_values]
    _emit(cfg, [{"s": s, **e.to_json()} for s, e in zip(cfg.s_values, ests)])
    return EXIT_OK if all(e.converged for e in ests) else EXIT_NONCONVERGED


def _opnorm(cfg: RunConfig) -> int:
    b = None if cfg.op in ("identity", "shift") else _step_input(cfg)
    depth = cfg.depth if b is None else max(cfg.depth, b.depth)
    kw = {} if cfg.max_iters is None else {"max_iters": cfg.max_iters}
    if cfg.tol is not None:
        kw["tol"] = cfg.tol
    ests = [operator_norm_hs(named_operator(cfg.op, b), s, depth, **kw) for s in cfg.s_values]
    _emit(cfg, [{"s": s, "op": cfg.op, "depth": depth, **e.to_json()} for s, e in zip(cfg.s_values, ests)])
    return EXIT_OK if all(e.converged for e in ests) else EXIT_NONCONVERGED


def _suite(cfg: RunConfig) -> int:
    opts = SuiteOptions(alpha=cfg.alpha, mode=cfg.mode, allow_depth_4=cfg.allow_depth_4)
    depths = cfg.depths or [cfg.depth]
    rows = []
    for name in cfg.suites or THEOREM_SUITES:
        try:
            rows += run_suite(name, cfg.s_values, depths, cfg.seed, cfg.trials, opts, cfg.jobs)
        except ExactDepthError as exc:
            raise ConfigError("--mode", str(exc)) from exc
    summary = summarize(rows)
    if cfg.format == "json":
        _write(cfg.output, json.dumps({"rows": rows, "summary": summary}, indent=2) + "\n")
        return EXIT_OK
    _write(cfg.output, rows_to_csv(rows))
    text = json.dumps(summary, indent=2) + "\n"
    if cfg.output:
        _write(cfg.output + ".summary.json", text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


_HANDLERS = {
    "verify": _verify,
    "norm": _norm,
    "capacity": _capacity,
    "bmos": _bmos,
    "embed": _embed,
    "opnorm": _opnorm,
    "suite": _suite,
}
assert set(_HANDLERS) == set(COMMANDS)


def main(argv=None) -> int:
    try:
        cfg = build_config(argv)
        return _HANDLERS[cfg.command](cfg)
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
