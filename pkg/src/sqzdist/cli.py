"""``sqzdist`` command-line front end.

Exit codes: 0 ok, 1 validation-suite failure, 2 parse error, 3 domain
validation error, 4 capacity error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys

import numpy as np
from pydantic import ValidationError

from .checks import run_validation
from .config import RunConfig, build_scenario, homogeneous_epsilon, load_config
from .distinguishability import classical_probability, delay_scan, homogeneous_decomposition
from .errors import CapacityError, CapacityExceeded, SqzDistError
from .pnr import DEFAULT_MAX_TOTAL, distribution, patterns_table, probability
from .series import box_indices
from .threshold import click_table

log = logging.getLogger("sqzdist")

EXIT_OK, EXIT_VALIDATION, EXIT_PARSE, EXIT_DOMAIN, EXIT_CAPACITY = 0, 1, 2, 3, 4


class ConfigMissing(Exception):
    """A required config section is absent."""


def fmt(x) -> str:
    return format(float(x), ".17g")


def pattern_str(n) -> str:
    return " ".join(str(int(k)) for k in n)


def _rows_out(header: list, rows: list, fmt_name: str, extra=None) -> str:
    if fmt_name == "json":
        doc = {"rows": [dict(zip(header, r)) for r in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) if isinstance(v, float) else ("" if v is None else v) for v in r])
    return buf.getvalue()


def _scenario(cfg: RunConfig):
    if cfg.scenario is None:
        raise ConfigMissing("config has no 'scenario' block")
    return build_scenario(cfg.scenario)


def _patterns_or_box(M: int, patterns, max_total):
    if patterns:
        return [tuple(p) for p in patterns]
    if max_total is None:
        raise ConfigMissing("need 'patterns' or 'max_total'")
    if max_total > DEFAULT_MAX_TOTAL:
        raise CapacityExceeded(f"max_total {max_total} exceeds the limit {DEFAULT_MAX_TOTAL}")
    return list(box_indices((max_total,) * M, max_total))


def cmd_prob(cfg: RunConfig, fmt_name: str) -> tuple[int, str]:
    sc = _scenario(cfg)
    if cfg.patterns:
        limit = cfg.max_total if cfg.max_total is not None else DEFAULT_MAX_TOTAL
        table = patterns_table(sc, cfg.patterns, limit)
    elif cfg.max_total is not None:
        table = distribution(sc, cfg.max_total)
    else:
        raise ConfigMissing("prob needs 'patterns' or 'max_total'")
    rows = [(pattern_str(n), p) for n, p in table]
    return EXIT_OK, _rows_out(["pattern", "probability"], rows, fmt_name)


def cmd_scan(cfg: RunConfig, fmt_name: str) -> tuple[int, str]:
    sc = _scenario(cfg)
    if cfg.scan is None:
        raise ConfigMissing("scan needs a 'scan' block")
    s = cfg.scan
    max_total = s.max_total if s.max_total is not None else cfg.max_total
    patterns = _patterns_or_box(sc.M, s.patterns or cfg.patterns, max_total)
    rows = [(x, w, pattern_str(n), p) for x, w, n, p in delay_scan(sc, s.grid, s.omega0s, patterns, s.sigma_t)]
    return EXIT_OK, _rows_out(["delta_t_over_sigma", "omega0", "pattern", "probability"], rows, fmt_name)


def cmd_threshold(cfg: RunConfig, fmt_name: str) -> tuple[int, str]:
    sc = _scenario(cfg)
    if cfg.clicks is not None:
        for flags in cfg.clicks:
            if any(f not in (0, 1) for f in flags):
                raise ValueError(f"click pattern {flags} must hold 0/1 flags")
    table = click_table(sc, cfg.clicks)
    rows = [(pattern_str(k), p) for k, p in table.items()]
    return EXIT_OK, _rows_out(["pattern", "probability"], rows, fmt_name)


def _uniform_classical(sc):
    """``(N, r)`` when the closed-form classical factor applies, else ``None``."""
    M = sc.M
    if not np.allclose(np.abs(sc.U) ** 2, 1 / M, atol=1e-12) or not np.all(sc.eta == 1):
        return None
    r = sc.squeeze.r[sc.squeeze.r > 0]
    if r.size == 0 or not np.allclose(r, r[0], rtol=0, atol=1e-15):
        return None
    return int(r.size), float(r[0])


def cmd_decompose(cfg: RunConfig, fmt_name: str) -> tuple[int, str]:
    sc = _scenario(cfg)
    eps = homogeneous_epsilon(cfg.scenario)
    if eps is None:
        raise ValueError("decompose needs a homogeneous overlap ({'homogeneous': eps})")
    patterns = _patterns_or_box(sc.M, cfg.patterns, cfg.max_total)
    closed = _uniform_classical(sc)
    header = ["pattern", "m", "weight", "classical", "classical_closed_form", "quantum", "term", "direct"]
    rows = []
    for n in patterns:
        rec = homogeneous_decomposition(sc, eps, n)
        for t in rec.nonzero_terms():
            cf = classical_probability(t.m, closed[0], sc.M, closed[1]) if closed else None
            rows.append((pattern_str(n), pattern_str(t.m), t.weight, t.classical, cf, t.quantum, t.value, None))
        rows.append((pattern_str(n), "total", None, None, None, None, rec.total, probability(sc, n, 10**6)))
    return EXIT_OK, _rows_out(header, rows, fmt_name, {"epsilon": eps})


def cmd_validate(cfg: RunConfig, fmt_name: str) -> tuple[int, str]:
    vc = cfg.validate_
    scenarios = [build_scenario(cfg.scenario)] if cfg.scenario is not None else []
    report = run_validation(
        vc.tolerances if vc else None,
        cfg.seed,
        vc.randomized if vc else 4,
        scenarios,
    )
    for c in report.checks:
        log.info("%-14s %s  max_error=%.3e tol=%.1e", c.name, "pass" if c.passed else "FAIL", c.max_error, c.tolerance)
    if fmt_name == "csv":
        header = ["check", "passed", "max_error", "tolerance", "cases", "detail"]
        rows = [(c.name, str(c.passed).lower(), float(c.max_error), float(c.tolerance), c.cases, c.detail) for c in report.checks]
        text = _rows_out(header, rows, "csv")
    else:
        text = json.dumps(report.as_dict(), indent=2) + "\n"
    return (EXIT_OK if report.passed else EXIT_VALIDATION), text


COMMANDS = {
    "prob": cmd_prob,
    "scan": cmd_scan,
    "threshold": cmd_threshold,
    "decompose": cmd_decompose,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"], help="output format")
    common.add_argument("--seed", type=int, metavar="N", help="override the config seed")
    common.add_argument("--max-total", type=int, metavar="N", help="override the config max_total")
    common.add_argument("-v", "--verbose", action="store_true")
    parser = argparse.ArgumentParser(prog="sqzdist", description="Photon-counting statistics of partially distinguishable squeezed light.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "prob": "photon-number-resolving pattern probabilities",
        "scan": "pattern probabilities along a relative-delay grid",
        "threshold": "click-pattern probabilities for threshold detectors",
        "decompose": "classical / noisy-quantum split of the homogeneous model",
        "validate": "run the self-validation suite",
    }
    for name, text in helps.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        updates = {}
        if args.seed is not None:
            updates["seed"] = args.seed
        if args.max_total is not None:
            updates["max_total"] = args.max_total
        if updates:
            cfg = RunConfig.model_validate({**cfg.model_dump(by_alias=True), **updates})
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        print(f"sqzdist: cannot parse config: {exc}", file=sys.stderr)
        return EXIT_PARSE
    fmt_name = args.format or cfg.format
    if args.command == "validate" and args.format is None:
        fmt_name = "json"
    try:
        code, text = COMMANDS[args.command](cfg, fmt_name)
    except ConfigMissing as exc:
        print(f"sqzdist: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"sqzdist: capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (SqzDistError, ValueError, ArithmeticError) as exc:
        print(f"sqzdist: invalid input: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    out = args.out or cfg.out
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def run() -> None:
    sys.exit(main())
