from fractions import Fraction

import numpy as np

from pldc.discrepancy import DEFAULT_M_BOUND, discrepancy, lambda_grid, rate_bound, theoretical_lambda
from pldc.errors import DataFormatError
from pldc.models import Standardizer
from pldc.utils.io import read_table
from pldc.utils.report import emit


def _fraction(text):
    """Accepts `0.0833` as well as `1/12`."""
    value = float(Fraction(text))
    if value < 0:
        raise ValueError(f"expected a nonnegative number, got {text!r}")
    return value


def register(subparsers):
    parser = subparsers.add_parser("discrepancy", help="empirical maximum discrepancy and the lambda grid")
    parser.add_argument("--data", required=True, help="CSV of inputs (the target column is ignored)")
    parser.add_argument("--target", default="y")
    parser.add_argument("--L", dest="L", type=float, default=1.0, help="seminorm budget")
    parser.add_argument("--seed", type=int, help="permute rows before splitting into halves")
    parser.add_argument("--m-bound", type=_fraction, default=DEFAULT_M_BOUND,
                        help="bound M on |y|; the theoretical lambda is 24*M*D")
    parser.add_argument("--m-scale", type=float, default=1.0)
    parser.add_argument("--standardize", action="store_true", help="standardize features first")
    parser.add_argument("--report", help="also write the report to this file")
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(func=run)
    return parser


def run(args):
    frame = read_table(args.data)
    if args.target in frame.columns:
        frame = frame.drop(columns=[args.target])
    if frame.shape[1] == 0:
        raise DataFormatError(f"{args.data} has no feature columns")
    x = frame.to_numpy(dtype=float)
    if args.standardize and x.shape[0]:
        x = Standardizer.fit(x).transform(x)

    result = discrepancy(x, L=args.L, seed=args.seed)
    if args.L > 0:
        # D(DC_L) = L * D(DC_1)
        d_unit = result.value / args.L
    else:
        d_unit = discrepancy(x, L=1.0, seed=args.seed).value

    n, d = x.shape
    summary = {
        "n": n,
        "d": d,
        "L": args.L,
        "discrepancy": round(result.value, 8),
        "lambda_grid": [round(v, 10) for v in lambda_grid(None, m_scale=args.m_scale, d_hat=d_unit)],
        "theoretical_lambda": round(theoretical_lambda(d_unit, args.m_bound), 10),
    }
    if result.dropped is not None:
        summary["dropped_row"] = result.dropped
    used = result.order.shape[0]
    if used >= d:
        R = float(np.max(np.abs(x))) if x.size else 0.0
        summary["rate_bound"] = round(rate_bound(args.L, R, d, used), 10)
    emit(args, summary)
    return 0
