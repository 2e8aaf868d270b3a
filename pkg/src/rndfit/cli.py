"""Command-line front end: chain-file I/O, pricing, calibration, studies.

Commands
--------
approx-density  fit a Hermite expansion to a test density, write the grid
price           price European puts under a named model
calibrate       fit an estimator to every block of an option-chain CSV
tables          regenerate the synthetic-study tables (vg1..vg3, hes1..hes3)
loo             leave-one-out out-of-sample study on an option-chain CSV
clean           volume/monotonicity filter for an option-chain CSV

Chain CSV schema (the single ingestion format; one header line, fields
comma-separated, decimal point, no thousands separators)::

    valuation_date,maturity_days,spot,rate,dividend_yield,strike,put_price,volume

valuation_date is ISO-8601; maturity_days and volume are integers; the rest
are reals.  Rows sharing (valuation_date, maturity_days) form one block and
must agree on spot, rate and dividend_yield.  Year fractions use ACT/365.
When two rows of a block quote the same strike, the higher-volume quote is
kept (ties keep the first row); other vendors' formats should be converted
to this schema by a thin external script.

Exit codes: 0 success, 2 schema error (bad arguments or malformed chain
file), 3 numeric/admissibility error, 4 non-convergence (only with
--strict).  Reports print three significant digits unless --full-precision
is given; grid/data files are always written at full precision.  Every
command is deterministic given its flags and seed.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass
from datetime import date

import numpy as np

from .bench import (
    HESTON_TEST_PARAMS,
    QUANTILE_LEVELS,
    VG_TEST_PARAMS,
    LooReport,
    OptionBlock,
    Quote,
    clean_dataset,
    density_error_table,
    loo_experiment,
    make_estimator,
    reference_density,
    reference_models,
    synthetic_pricing_experiment,
)
from .calib import CalibrationResult, fit_bs, fit_heston, fit_hermite, fit_vg
from .density import (
    AdmissibilityError,
    DensityGrid,
    HestonParams,
    VgParams,
    heston_density_fft,
    vg_log_return_density,
    vg_moments,
)
from .hermite import HermiteModel, eval_model, model_from_density
from .pricing import PutSpec, bs_put, heston_put, vg_put

__all__ = ["main", "ChainSchemaError", "ConvergenceError", "load_chain", "write_chain"]

CHAIN_HEADER = (
    "valuation_date",
    "maturity_days",
    "spot",
    "rate",
    "dividend_yield",
    "strike",
    "put_price",
    "volume",
)

DAYS_PER_YEAR = 365.0


class ChainSchemaError(ValueError):
    """Malformed chain file or option data; message names the input line."""


class ConvergenceError(RuntimeError):
    """A fit failed to converge and --strict was requested."""


# ---------------------------------------------------------------------------
# formatting


def _fmt(value, full: bool) -> str:
    """Three significant digits by default; shortest-round-trip when full."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}" if full else f"{x:.3g}"


def _render_aligned(headers: list[str], rows: list[list[str]]) -> str:
    """Plain-text table: first column left-aligned, the rest right-aligned."""
    table = [list(headers)] + [list(r) for r in rows]
    widths = [max(len(row[j]) for row in table) for j in range(len(headers))]
    lines = []
    for row in table:
        cells = [row[0].ljust(widths[0])]
        cells += [row[j].rjust(widths[j]) for j in range(1, len(row))]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _write_delimited(path: str, headers: list[str], rows: list[list[str]]) -> None:
    with open(path, "w") as fh:
        fh.write("\t".join(headers) + "\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")


def _emit_table(args, headers: list[str], rows: list[list[str]]) -> None:
    sys.stdout.write(_render_aligned(headers, rows))
    out = getattr(args, "out", None)
    if out:
        _write_delimited(out, headers, rows)


# ---------------------------------------------------------------------------
# chain-file I/O


def _parse_field(raw: str, kind, name: str, lineno: int):
    try:
        return kind(raw)
    except ValueError:
        wanted = {date.fromisoformat: "an ISO-8601 date", int: "an integer", float: "a real"}[kind]
        raise ChainSchemaError(
            f"line {lineno}: field {name!r} must be {wanted}, got {raw!r}"
        ) from None


@dataclass(frozen=True)
class _ChainRow:
    valuation_date: date
    maturity_days: int
    spot: float
    rate: float
    dividend_yield: float
    strike: float
    put_price: float
    volume: int
    lineno: int


def _parse_chain_row(line: str, lineno: int) -> _ChainRow:
    parts = [p.strip() for p in line.split(",")]
    if len(parts) != len(CHAIN_HEADER):
        raise ChainSchemaError(
            f"line {lineno}: expected {len(CHAIN_HEADER)} comma-separated fields, "
            f"got {len(parts)}"
        )
    kinds = (date.fromisoformat, int, float, float, float, float, float, int)
    values = [
        _parse_field(raw, kind, name, lineno)
        for raw, kind, name in zip(parts, kinds, CHAIN_HEADER)
    ]
    row = _ChainRow(*values, lineno=lineno)
    if row.maturity_days <= 0:
        raise ChainSchemaError(f"line {lineno}: maturity_days must be positive, got {row.maturity_days}")
    if row.spot <= 0.0:
        raise ChainSchemaError(f"line {lineno}: spot must be positive, got {row.spot}")
    if row.strike <= 0.0:
        raise ChainSchemaError(f"line {lineno}: strike must be positive, got {row.strike}")
    if row.put_price <= 0.0:
        raise ChainSchemaError(f"line {lineno}: put_price must be positive, got {row.put_price}")
    if row.volume < 0:
        raise ChainSchemaError(f"line {lineno}: volume must be non-negative, got {row.volume}")
    return row


def load_chain(path: str) -> list[OptionBlock]:
    """Parse a chain CSV into blocks, sorted by (date, maturity).

    Schema violations raise ChainSchemaError naming the offending line.
    Within a block, quotes are sorted by strike and duplicate strikes are
    resolved by keeping the higher-volume quote.
    """
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ChainSchemaError(f"cannot read chain file {path!r}: {exc}") from None
    if not lines:
        raise ChainSchemaError("line 1: empty file; expected a header line")
    header = tuple(p.strip() for p in lines[0].split(","))
    if header != CHAIN_HEADER:
        raise ChainSchemaError(
            "line 1: header must be exactly " + ",".join(CHAIN_HEADER)
        )
    groups: dict[tuple[date, int], list[_ChainRow]] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        row = _parse_chain_row(line, lineno)
        groups.setdefault((row.valuation_date, row.maturity_days), []).append(row)

    blocks = []
    for (day, days), rows in sorted(groups.items()):
        first = rows[0]
        for row in rows[1:]:
            for name in ("spot", "rate", "dividend_yield"):
                if getattr(row, name) != getattr(first, name):
                    raise ChainSchemaError(
                        f"line {row.lineno}: {name} disagrees with line {first.lineno} "
                        f"of the same (valuation_date, maturity_days) block"
                    )
        by_strike: dict[float, _ChainRow] = {}
        for row in rows:
            held = by_strike.get(row.strike)
            if held is None or row.volume > held.volume:
                by_strike[row.strike] = row
        quotes = tuple(
            Quote(row.strike, row.put_price, row.volume)
            for row in sorted(by_strike.values(), key=lambda r: r.strike)
        )
        blocks.append(
            OptionBlock(
                valuation_date=day,
                maturity_days=days,
                t=days / DAYS_PER_YEAR,
                spot=first.spot,
                rate=first.rate,
                dividend_yield=first.dividend_yield,
                quotes=quotes,
            )
        )
    return blocks


def write_chain(blocks, stream) -> None:
    """Write blocks back out in the chain CSV schema (round-trip exact)."""
    stream.write(",".join(CHAIN_HEADER) + "\n")
    for block in blocks:
        prefix = (
            f"{block.valuation_date.isoformat()},{block.maturity_days},"
            f"{block.spot!r},{block.rate!r},{block.dividend_yield!r}"
        )
        for quote in block.quotes:
            stream.write(f"{prefix},{quote.strike!r},{quote.put_price!r},{quote.volume}\n")


# ---------------------------------------------------------------------------
# model-spec plumbing


def _vg_from_args(args) -> VgParams:
    return VgParams(args.theta, args.sigma, args.alpha)


def _heston_from_args(args) -> HestonParams:
    return HestonParams(args.v0, args.kappa, args.theta, args.eta, args.rho)


def _add_family_params(parser: argparse.ArgumentParser) -> None:
    """Flags for the two test families; defaults are the study's test params."""
    parser.add_argument("--theta", type=float, default=None, help="vg: Brownian drift of the time-changed log return; heston: long-run variance")
    parser.add_argument("--sigma", type=float, default=None, help="vg: diffusion scale (also the bs volatility for `price --model bs`)")
    parser.add_argument("--alpha", type=float, default=None, help="vg: gamma-clock decay rate")
    parser.add_argument("--v0", type=float, default=None, help="heston: initial variance")
    parser.add_argument("--kappa", type=float, default=None, help="heston: mean-reversion speed")
    parser.add_argument("--eta", type=float, default=None, help="heston: volatility of variance")
    parser.add_argument("--rho", type=float, default=None, help="heston: spot/variance correlation")


def _named_params(args):
    """Resolve the family flags to parameters, defaulting to test values."""
    if args.family == "vg":
        base = VG_TEST_PARAMS
        return VgParams(
            base.theta if args.theta is None else args.theta,
            base.sigma if args.sigma is None else args.sigma,
            base.alpha if args.alpha is None else args.alpha,
        )
    base = HESTON_TEST_PARAMS
    return HestonParams(
        base.v0 if args.v0 is None else args.v0,
        base.kappa if args.kappa is None else args.kappa,
        base.theta if args.theta is None else args.theta,
        base.eta if args.eta is None else args.eta,
        base.rho if args.rho is None else args.rho,
    )


def _named_density(family: str, params, t: float, points: int = 2 ** 14) -> DensityGrid:
    if family == "vg":
        mean, std = vg_moments(params, t)
        return DensityGrid.from_callable(
            lambda x: vg_log_return_density(params, t, x), mean, 12.0 * std, points
        )
    return heston_density_fft(params, t, n=points)


def _params_cells(params) -> list[tuple[str, float]]:
    """Flatten fitted parameters into (name, value) pairs for display."""
    if isinstance(params, float):
        return [("sigma", params)]
    if isinstance(params, VgParams):
        return [("theta", params.theta), ("sigma", params.sigma), ("alpha", params.alpha)]
    if isinstance(params, HestonParams):
        return [
            ("v0", params.v0),
            ("kappa", params.kappa),
            ("theta", params.theta),
            ("eta", params.eta),
            ("rho", params.rho),
        ]
    if isinstance(params, HermiteModel):
        pairs = [("a", params.a), ("b", params.b)]
        pairs += [(f"c{i}", float(c)) for i, c in enumerate(params.coeffs)]
        return pairs
    raise TypeError(f"cannot render parameters of type {type(params).__name__}")


# ---------------------------------------------------------------------------
# commands


def cmd_approx_density(args) -> int:
    params = _named_params(args)
    if args.order == 0 and args.flavor == "free":
        print(
            "notice: the order-0 free fit is degenerate - scale, location and the "
            "single coefficient trade off against each other.",
            file=sys.stderr,
        )
    target = _named_density(args.family, params, args.t, args.points)
    model = model_from_density(target, args.flavor, args.order, optimize=args.optimize)
    row = density_error_table(target, [model])[0]

    token = f"h{args.order}{'f' if args.flavor == 'free' else args.flavor}"
    label = token + ("*" if args.optimize else "")
    headers = ["model", "l2_pct", "l1_pct", "linf_pct"]
    cells = [label] + [_fmt(row[k], args.full_precision) for k in ("l2", "l1", "linf")]
    _emit_table(args, headers, [cells])

    fitted = eval_model(model, target.x)
    with open(args.grid_out, "w") as fh:
        fh.write("x\ttarget\tapproximation\n")
        for xi, ti, fi in zip(target.x, target.f, fitted):
            fh.write(f"{xi:.17g}\t{ti:.17g}\t{fi:.17g}\n")
    print(f"grid written to {args.grid_out}", file=sys.stderr)
    return 0


def cmd_price(args) -> int:
    if args.strikes_file:
        with open(args.strikes_file) as fh:
            strikes = [float(tok) for tok in fh.read().split()]
    else:
        strikes = list(args.strikes)
    if not strikes:
        raise ChainSchemaError("no strikes given; pass strikes or --strikes-file")
    if any(k < 0.0 for k in strikes):
        raise ValueError("strikes must be non-negative")

    if args.model == "bs":
        sigma = 0.2 if args.sigma is None else args.sigma
        if sigma <= 0.0:
            raise AdmissibilityError(f"sigma must be > 0, got {sigma}")
        price_one = lambda spec: bs_put(spec, sigma)
    elif args.model == "vg":
        args.family = "vg"
        params = _named_params(args)
        price_one = lambda spec: vg_put(params, spec)
    else:
        args.family = "heston"
        params = _named_params(args)
        price_one = lambda spec: heston_put(params, spec, alpha_damp=args.alpha_damp)

    headers = ["strike", "put_price"]
    rows = []
    for k in strikes:
        if k == 0.0:
            print("warning: strike 0 put is worthless; price set to 0", file=sys.stderr)
            price = 0.0
        else:
            price = price_one(PutSpec(args.s0, k, args.r, args.q, args.t))
        rows.append([_fmt(k, args.full_precision), _fmt(price, args.full_precision)])
    _emit_table(args, headers, rows)
    return 0


def _fit_block(block: OptionBlock, token: str) -> tuple[object, CalibrationResult]:
    if token == "bs":
        return fit_bs(block)
    if token == "vg":
        return fit_vg(block)
    if token == "heston":
        return fit_heston(block)
    make_estimator(token)  # validates the h<order><p|m|f> grammar
    order, flavor = int(token[1:-1]), {"p": "p", "m": "m", "f": "free"}[token[-1]]
    return fit_hermite(block, order, flavor)


def cmd_calibrate(args) -> int:
    blocks = load_chain(args.chain)
    if args.volume_floor is not None:
        blocks, removed = clean_dataset(blocks, volume_floor=args.volume_floor)
        print(f"cleaning removed {removed} quotes", file=sys.stderr)
    if not blocks:
        raise ChainSchemaError("chain file holds no quotes after cleaning")

    headers = ["date", "days", "quotes", "objective", "converged", "overfit", "params"]
    rows = []
    stalled = 0
    for block in blocks:
        params, result = _fit_block(block, args.estimator)
        stalled += not result.converged
        pairs = _params_cells(params)
        rows.append(
            [
                block.valuation_date.isoformat(),
                str(block.maturity_days),
                str(block.size),
                _fmt(result.objective, args.full_precision),
                str(result.converged),
                str(result.overfit),
                " ".join(f"{k}={_fmt(v, args.full_precision)}" for k, v in pairs),
            ]
        )
    _emit_table(args, headers, rows)
    if stalled and args.strict:
        raise ConvergenceError(f"{stalled} of {len(blocks)} fits did not converge")
    return 0


_TABLE_SUITES = {
    "vg1": ("vg", "density"),
    "vg2": ("vg", "raw"),
    "vg3": ("vg", "corrected"),
    "hes1": ("heston", "density"),
    "hes2": ("heston", "raw"),
    "hes3": ("heston", "corrected"),
}


def cmd_tables(args) -> int:
    family, kind = _TABLE_SUITES[args.which]
    models = reference_models(family)
    labels = [label for label, _ in models]
    full = args.full_precision

    if kind == "density":
        table = density_error_table(reference_density(family), [m for _, m in models])
        headers = ["error_pct"] + labels
        rows = [
            [name] + [_fmt(row[key], full) for row in table]
            for name, key in (("l2", "l2"), ("l1", "l1"), ("linf", "linf"))
        ]
    else:
        stats = synthetic_pricing_experiment(
            family, args.seed, corrected=(kind == "corrected"), models=models
        )
        headers = ["stat_pct"] + labels
        rows = [["mean"] + [_fmt(100.0 * rep.mean, full) for _, rep in stats]]
        for level in QUANTILE_LEVELS:
            rows.append(
                [f"q{level}"]
                + [_fmt(100.0 * rep.quantiles[level], full) for _, rep in stats]
            )
        rows.append(["points"] + [str(rep.n_points) for _, rep in stats])
    _emit_table(args, headers, rows)
    return 0


def _loo_cell(report, key, full: bool) -> str:
    """Format `value (in-range value)` for one statistics row, in percent."""
    def pick(rep):
        value = rep.mean if key == "mean" else rep.quantiles[key]
        return _fmt(100.0 * value, full)

    cell = pick(report)
    if report.in_range_variant is not None and report.in_range_variant.n_points > 0:
        cell += f" ({pick(report.in_range_variant)})"
    return cell


def cmd_loo(args) -> int:
    blocks = load_chain(args.chain)
    blocks, removed = clean_dataset(blocks, volume_floor=args.volume_floor)
    if removed:
        print(f"cleaning removed {removed} quotes", file=sys.stderr)
    if not blocks:
        raise ChainSchemaError("chain file holds no quotes after cleaning")
    tokens = [tok.strip() for tok in args.estimators.split(",") if tok.strip()]
    if not tokens:
        raise ChainSchemaError("no estimators given")
    estimators = [make_estimator(tok) for tok in tokens]

    reports: list[LooReport] = loo_experiment(
        blocks, estimators, min_block_size=args.min_block_size
    )
    full = args.full_precision
    headers = ["stat_pct"] + [rep.estimator for rep in reports]

    def count_cell(rep: LooReport) -> str:
        cell = str(rep.report.n_points)
        if rep.report.in_range_variant is not None:
            cell += f" ({rep.report.in_range_variant.n_points})"
        return cell

    rows = [
        ["points"] + [count_cell(rep) for rep in reports],
        ["failures"] + [str(rep.calibration_failures) for rep in reports],
        ["mean"] + [_loo_cell(rep.report, "mean", full) for rep in reports],
    ]
    for level in QUANTILE_LEVELS:
        rows.append([f"q{level}"] + [_loo_cell(rep.report, level, full) for rep in reports])
    _emit_table(args, headers, rows)

    failures = sum(rep.calibration_failures for rep in reports)
    if failures and args.strict:
        raise ConvergenceError(f"{failures} calibration failures across estimators")
    return 0


def cmd_clean(args) -> int:
    blocks = load_chain(args.chain)
    kept, removed = clean_dataset(
        blocks, volume_floor=args.volume_floor, keep=args.keep
    )
    n_quotes = sum(b.size for b in kept)
    if args.out:
        with open(args.out, "w") as fh:
            write_chain(kept, fh)
        print(
            f"removed {removed} quotes; kept {n_quotes} across {len(kept)} blocks "
            f"-> {args.out}"
        )
    else:
        buffer = io.StringIO()
        write_chain(kept, buffer)
        sys.stdout.write(buffer.getvalue())
        print(
            f"removed {removed} quotes; kept {n_quotes} across {len(kept)} blocks",
            file=sys.stderr,
        )
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rndfit",
        description=(
            "Risk-neutral density and put-price toolkit: Hermite-expansion, "
            "Black-Scholes, variance-gamma and Heston models with calibration "
            "and out-of-sample studies."
        ),
        epilog=(
            "exit codes: 0 success, 2 schema error, 3 numeric/admissibility "
            "error, 4 non-convergence (with --strict)"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, out_help: str) -> None:
        p.add_argument("--full-precision", action="store_true", help="print full float precision instead of 3 significant digits")
        p.add_argument("--out", default=None, help=out_help)

    p = sub.add_parser("approx-density", help="fit a Hermite expansion to a test density")
    p.add_argument("--family", choices=("vg", "heston"), required=True)
    p.add_argument("--flavor", choices=("free", "p", "m"), default="p", help="free=(a,b) unconstrained, p=location pinned to -a^2/2, m=p plus unit-mass and martingale constraints")
    p.add_argument("--order", type=int, default=1, help="expansion order n (default 1)")
    p.add_argument("--optimize", action="store_true", help="tune scale/location for the constrained L2 error instead of moment matching")
    p.add_argument("--t", type=float, default=1.0, help="maturity in years (default 1)")
    p.add_argument("--points", type=int, default=2 ** 14, help="grid points (default 16384)")
    p.add_argument("--grid-out", default="density_fit.dat", help="path of the x/target/approximation grid file")
    _add_family_params(p)
    common(p, out_help="also write the error table as tab-delimited text")
    p.set_defaults(handler=cmd_approx_density)

    p = sub.add_parser("price", help="price European puts under a named model")
    p.add_argument("--model", choices=("bs", "vg", "heston"), required=True)
    p.add_argument("strikes", nargs="*", type=float, help="strike levels")
    p.add_argument("--strikes-file", default=None, help="file of whitespace-separated strikes")
    p.add_argument("--s0", type=float, default=1.0, help="spot (default 1)")
    p.add_argument("--r", type=float, default=0.0, help="risk-free rate (default 0)")
    p.add_argument("--q", type=float, default=0.0, help="dividend yield (default 0)")
    p.add_argument("--t", type=float, default=1.0, help="maturity in years (default 1)")
    p.add_argument("--alpha-damp", type=float, default=-1.75, help="heston payoff-transform damping exponent (default -1.75)")
    _add_family_params(p)
    common(p, out_help="also write the price table as tab-delimited text")
    p.set_defaults(handler=cmd_price)

    p = sub.add_parser("calibrate", help="fit an estimator to every block of a chain CSV")
    p.add_argument("chain", help="option-chain CSV (see module docstring for the schema)")
    p.add_argument("--estimator", default="bs", help="bs, vg, heston, or h<order><p|m|f> (default bs)")
    p.add_argument("--volume-floor", type=int, default=None, help="clean the chain first, dropping volume below this floor")
    p.add_argument("--strict", action="store_true", help="exit 4 when any fit fails to converge")
    common(p, out_help="also write the calibration table as tab-delimited text")
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("tables", help="regenerate the synthetic-study tables")
    p.add_argument("which", choices=sorted(_TABLE_SUITES), help="vg1/hes1 density errors, vg2/hes2 raw pricing stats, vg3/hes3 anchor-corrected pricing stats")
    p.add_argument("--seed", type=int, default=0, help="strike-draw seed (default 0)")
    common(p, out_help="also write the table as tab-delimited text")
    p.set_defaults(handler=cmd_tables)

    p = sub.add_parser("loo", help="leave-one-out study on a chain CSV")
    p.add_argument("chain", help="option-chain CSV")
    p.add_argument("--estimators", default="bs", help="comma-separated estimator tokens (default bs)")
    p.add_argument("--min-block-size", type=int, default=1, choices=range(1, 6), help="exclude blocks with at most this many quotes (default 1)")
    p.add_argument("--volume-floor", type=int, default=1, help="cleaning volume floor (default 1)")
    p.add_argument("--strict", action="store_true", help="exit 4 when any calibration fails")
    common(p, out_help="also write the report as tab-delimited text")
    p.set_defaults(handler=cmd_loo)

    p = sub.add_parser("clean", help="volume/monotonicity filter for a chain CSV")
    p.add_argument("chain", help="option-chain CSV")
    p.add_argument("--volume-floor", type=int, default=1, help="drop quotes with volume below this (default 1)")
    p.add_argument("--keep", choices=("lower", "higher"), default="lower", help="which quote survives a price-monotonicity conflict (default lower strike)")
    p.add_argument("--out", default=None, help="write the cleaned CSV here (default: stdout)")
    p.set_defaults(handler=cmd_clean, full_precision=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ChainSchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (AdmissibilityError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
