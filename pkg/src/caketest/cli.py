"""Command-line interface: ``caketest test ...``, ``caketest simulate``, ``caketest table2``.

Every command parses input, calls one library function and prints the
result; no statistics are computed here.  Exit codes: 0 success, 2 malformed
input or scenario, 3 degenerate data (zero variance, exact fit, rank
deficiency, failed quadrature).
"""

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys

from . import binomial, linear_model, normal, simulate
from .cake_core import PriorSettings
from .errors import (
    CakeError,
    ConstantColumn,
    ConstantResponse,
    DegenerateFit,
    DegenerateIntegrand,
    DegenerateSample,
    NoValidCandidate,
    NonConvergent,
    RankDeficient,
)

SCHEMA_VERSION = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
_DEGENERATE = (
    ConstantColumn, ConstantResponse, DegenerateFit, DegenerateIntegrand,
    DegenerateSample, NoValidCandidate, NonConvergent, RankDeficient,
)


class InputError(Exception):
    """Malformed command-line input (exit code 2)."""


def _round(value):
    """10 significant digits for floats; recursive over containers."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return None
        return float(format(value, ".10g"))
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if hasattr(value, "item"):
        return _round(value.item())
    return str(value)


def _parse_h(text):
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"h must be a number or 'inf', got {text!r}") from None


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------


def _read_rows(path):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            return [row for row in csv.reader(fh)]
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except (csv.Error, UnicodeDecodeError) as exc:
        raise InputError(f"{path}: not a readable CSV file ({exc})") from None


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def read_column(path):
    """One numeric column; a non-numeric first row is taken as a header."""
    rows = _read_rows(path)
    start = 1 if rows and rows[0] and not _is_number(rows[0][0]) else 0
    values = []
    for i, row in enumerate(rows[start:], start=start + 1):
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        if len(cells) != 1:
            raise InputError(f"{path}, row {i}: expected one column, found {len(cells)}")
        try:
            v = float(cells[0])
        except ValueError:
            raise InputError(f"{path}, row {i}: {cells[0]!r} is not a number") from None
        if not math.isfinite(v):
            raise InputError(f"{path}, row {i}: value {cells[0]!r} is not finite")
        values.append(v)
    if len(values) < 2:
        raise InputError(f"{path}: need at least two observations, found {len(values)}")
    return values


def read_table(path):
    """Header row plus numeric rows; returns ``(names, rows)``."""
    rows = [r for r in _read_rows(path) if any(c.strip() for c in r)]
    if not rows:
        raise InputError(f"{path}: file is empty")
    header = [c.strip() for c in rows[0]]
    if all(_is_number(c) for c in header):
        raise InputError(f"{path}, row 1: a header row is required")
    if len(header) < 2:
        raise InputError(f"{path}, row 1: need a response column and at least one covariate")
    data = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"{path}, row {i}: expected {len(header)} fields, found {len(row)}")
        try:
            values = [float(c) for c in row]
        except ValueError:
            raise InputError(f"{path}, row {i}: non-numeric field") from None
        if not all(math.isfinite(v) for v in values):
            raise InputError(f"{path}, row {i}: non-finite field")
        data.append(values)
    return header, data


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def result_payload(test, result, settings):
    payload = {
        "schema_version": SCHEMA_VERSION,
        "test": test,
        "lambda_bayes": result.lambda_bayes,
        "lambda_lrt": result.lambda_lrt,
        "nu": result.nu,
        "n": result.n,
        "log_bf01": result.log_bf01,
        "posterior_odds": result.posterior_odds_01,
        "decision": result.decision.value,
        "interpretation": {
            "label": result.interpretation.label,
            "favours": result.interpretation.favours,
        },
        "equivalent_alpha": result.equivalent_alpha,
        "settings": {"h": settings.h, "delta": settings.delta, "prior_odds": settings.prior_odds},
    }
    if result.extras:
        payload["extras"] = result.extras
    return _round(payload)


def _flatten(payload, prefix=""):
    flat = {}
    for key, value in payload.items():
        if isinstance(value, dict):
            flat.update(_flatten(value, f"{prefix}{key}."))
        else:
            flat[f"{prefix}{key}"] = value
    return flat


def _emit(payload, fmt, out, rows_key=None):
    """Write ``payload`` as JSON, or as CSV (one row, or one per entry of ``rows_key``)."""
    if fmt == "json":
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        rows = payload[rows_key] if rows_key else [_flatten(payload)]
        writer.writerow(list(rows[0]))
        for row in rows:
            writer.writerow(["" if v is None else v for v in row.values()])
        text = buf.getvalue()
    if out:
        with open(out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summary(result):
    ev = result.interpretation
    print(
        f"decision: {result.decision.value} (lambda_bayes = {result.lambda_bayes:.6g}; "
        f"{ev.label}, favours {ev.favours})",
        file=sys.stderr,
    )


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _settings(args):
    return PriorSettings(h=getattr(args, "h", math.inf), delta=args.delta,
                         prior_odds=args.prior_odds)


def _finish(name, result, settings, args):
    _emit(result_payload(name, result, settings), args.format, args.out)
    _summary(result)
    return 0


def cmd_one_sample(args):
    settings = _settings(args)
    result = normal.one_sample(read_column(args.data), args.mu0, settings)
    return _finish("one_sample", result, settings, args)


def cmd_two_sample(args):
    settings = _settings(args)
    result = normal.two_sample(read_column(args.group0), read_column(args.group1), settings)
    return _finish("two_sample", result, settings, args)


def cmd_binom(args):
    settings = _settings(args)
    result = binomial.binomial_jeffreys(args.s, args.n, settings)
    return _finish("binomial", result, settings, args)


def cmd_z(args):
    settings = _settings(args)
    result = normal.z_test_augmented(read_column(args.data), args.mu0, args.sigma2,
                                     settings=settings)
    return _finish("z_known_variance", result, settings, args)


def _linear_data(path):
    header, rows = read_table(path)
    y = [r[0] for r in rows]
    X = [r[1:] for r in rows]
    return linear_model.standardize(y, X, names=header[1:])


def cmd_linear(args):
    settings = _settings(args)
    data = _linear_data(args.data)
    if args.select:
        if args.gamma0 or args.gamma1:
            raise InputError("--select cannot be combined with --gamma0/--gamma1")
        ranking = linear_model.select_model(
            data, linear_model.enumerate_models(data.p, args.max_size))
        payload = _round({
            "schema_version": SCHEMA_VERSION,
            "test": "linear_select",
            "columns": list(data.names),
            "n": data.n,
            "ranking": ranking,
        })
        _emit(payload, args.format, args.out, rows_key="ranking")
        print(f"best model: {ranking[0]['gamma']} (bic = {ranking[0]['bic']:.6g})",
              file=sys.stderr)
        return 0
    if not (args.gamma0 and args.gamma1):
        raise InputError("give --gamma0 and --gamma1, or --select")
    result = linear_model.linear_test(data, args.gamma0, args.gamma1, settings)
    return _finish("linear", result, settings, args)


def cmd_simulate(args):
    scenario = simulate.load_scenario(args.scenario)
    overrides = {k: v for k, v in (("seed", args.seed), ("replicates", args.replicates),
                                   ("alpha", args.alpha)) if v is not None}
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    os.makedirs(args.out, exist_ok=True)
    stem = scenario.name or os.path.splitext(os.path.basename(args.scenario))[0]
    result = simulate.run_scenario(scenario, workers=args.workers)
    csv_path = os.path.join(args.out, f"{stem}.csv")
    svg_path = None if args.no_svg else os.path.join(args.out, f"{stem}.svg")
    simulate.emit_figure_data(result, csv_path, svg_path)
    print(f"{stem}: {len(result.cells)} cells x {scenario.replicates} replicates")
    for c in result.cells:
        print(f"  truth={c.truth_label:<22} n={c.n:<10} bayes={c.bayes_rate:.4f} "
              f"lrt={c.lrt_rate:.4f} disagree={c.disagree_rate:.4f} se={c.bayes_se:.4f}"
              + (f" errors={c.errors}" if c.errors else ""))
    print(f"wrote {csv_path}" + (f" and {svg_path}" if svg_path else ""))
    return 0


def cmd_table2(args):
    left, right = simulate.table2(args.n, args.nu, args.lambdas, args.pvalues)
    simulate.write_table2_csv(args.out, left, right)
    print("p-value of the LRT at lambda_Bayes thresholds")
    print("nu  lambda  " + "  ".join(f"n={n:<9}" for n in args.n))
    for i in range(0, len(left), len(args.n)):
        block = left[i:i + len(args.n)]
        print(f"{block[0]['nu']:<3} {block[0]['lambda_bayes']:<7g} "
              + "  ".join(f"{r['p_value']:<11.2E}" for r in block))
    print("lambda_Bayes at LRT p-values")
    print("nu  p-value " + "  ".join(f"n={n:<7}" for n in args.n))
    for i in range(0, len(right), len(args.n)):
        block = right[i:i + len(args.n)]
        print(f"{block[0]['nu']:<3} {block[0]['p_value']:<7g} "
              + "  ".join(f"{r['lambda_bayes']:<9.1f}" for r in block))
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _prior_flags(p, with_h=True):
    if with_h:
        p.add_argument("--h", type=_parse_h, default=math.inf,
                       help="prior diffuseness; 'inf' (default) uses the closed-form limit")
    p.add_argument("--delta", type=float, default=0.0, help="offset added to lambda_Bayes")
    p.add_argument("--prior-odds", type=float, default=1.0, help="p(H0) / p(H1)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the result here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="caketest",
                                     description="Bayesian hypothesis tests with cake priors.")
    sub = parser.add_subparsers(dest="command", required=True)

    test = sub.add_parser("test", help="run one test on data")
    tests = test.add_subparsers(dest="test", required=True)

    p = tests.add_parser("one-sample", help="normal mean, unknown variance")
    p.add_argument("--mu0", type=float, default=0.0)
    _prior_flags(p)
    p.add_argument("data")
    p.set_defaults(func=cmd_one_sample)

    p = tests.add_parser("two-sample", help="one normal population against two")
    _prior_flags(p)
    p.add_argument("group0")
    p.add_argument("group1")
    p.set_defaults(func=cmd_two_sample)

    p = tests.add_parser("binom", help="fair proportion against a Jeffreys prior")
    p.add_argument("--s", type=int, required=True, help="number of successes")
    p.add_argument("--n", type=int, required=True, help="number of trials")
    _prior_flags(p, with_h=False)
    p.set_defaults(func=cmd_binom)

    p = tests.add_parser("z", help="normal mean, known variance")
    p.add_argument("--mu0", type=float, default=0.0)
    p.add_argument("--sigma2", type=float, required=True)
    _prior_flags(p)
    p.add_argument("data")
    p.set_defaults(func=cmd_z)

    p = tests.add_parser("linear", help="nested linear models or model selection")
    p.add_argument("--gamma0", help="0/1 string marking covariates of the null model")
    p.add_argument("--gamma1", help="0/1 string marking covariates of the alternative")
    p.add_argument("--select", action="store_true", help="rank all models by BIC")
    p.add_argument("--max-size", type=int, default=None)
    _prior_flags(p)
    p.add_argument("data", help="CSV with header; first column is the response")
    p.set_defaults(func=cmd_linear)

    p = sub.add_parser("simulate", help="Monte Carlo error rates for a scenario")
    p.add_argument("--scenario", required=True,
                   help="scenario file, or the name of a bundled scenario "
                        f"({', '.join(simulate.bundled_scenarios())})")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None,
                   help="process count (capped by CAKETEST_THREADS)")
    p.add_argument("--no-svg", action="store_true")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--replicates", type=int, default=None, help="override the replicate count")
    p.add_argument("--alpha", type=float, default=None, help="override the LRT level")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table2", help="p-value / lambda_Bayes correspondence tables")
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, nargs="+", default=[50, 100, 1000])
    p.add_argument("--nu", type=int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--lambdas", type=float, nargs="+", default=[0, 2, 6, 10])
    p.add_argument("--pvalues", type=float, nargs="+", default=[0.05, 0.01, 0.001, 0.0001])
    p.set_defaults(func=cmd_table2)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DEGENERATE as exc:
        print(f"caketest: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputError, CakeError, ValueError) as exc:
        print(f"caketest: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"caketest: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
