import logging

from pldc.select import synthetic_arrays
from pldc.utils.io import write_csv

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("synth", help="draw the synthetic benchmark dataset")
    parser.add_argument("--n", type=int, required=True, help="number of points")
    parser.add_argument("--d", type=int, required=True, help="input dimension")
    parser.add_argument("--noise", type=float, default=0.25, help="standard deviation of the additive noise")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True)
    parser.set_defaults(func=run)
    return parser


def run(args):
    x, y = synthetic_arrays(args.n, args.d, noise_sd=args.noise, seed=args.seed)
    columns = {f"x{j + 1}": x[:, j] for j in range(args.d)}
    columns["y"] = y
    write_csv(args.out, columns)
    logger.info(f"Wrote {args.n} synthetic points (d={args.d}, seed={args.seed}) to {args.out}")
    return 0
