from pldc.core import seminorm_bound
from pldc.errors import DataFormatError
from pldc.relu_bridge import pldc_to_relu, relu_to_pldc, seminorm_certificate
from pldc.utils.io import load_model, load_relu, save_model, save_relu
from pldc.utils.report import emit


def register(subparsers):
    parser = subparsers.add_parser("convert", help="convert between ReLU networks and PLDC models")
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--relu", help="ReLU network JSON")
    source.add_argument("--model", help="PLDC model JSON (regression or binary)")
    parser.add_argument("--to", choices=["pldc", "relu"], required=True)
    parser.add_argument("--out", required=True)
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(func=run)
    return parser


def run(args):
    if args.relu is not None:
        if args.to != "pldc":
            raise ValueError("a ReLU network can only be converted --to pldc")
        net = load_relu(args.relu)
        model = relu_to_pldc(net)
        save_model(args.out, model, task="regression")
        summary = {
            "depth": net.depth,
            "widths": net.widths,
            "k1": model.phi1.n_planes,
            "k2": model.phi2.n_planes,
            "certificate": seminorm_certificate(net),
            "seminorm_bound": seminorm_bound(model),
        }
    else:
        if args.to != "relu":
            raise ValueError("a PLDC model can only be converted --to relu")
        model, payload = load_model(args.model)
        if payload["task"] == "multiclass":
            raise DataFormatError("multiclass models hold several scorers; convert them one at a time")
        net = pldc_to_relu(model)
        save_relu(args.out, net)
        summary = {
            "k1": model.phi1.n_planes,
            "k2": model.phi2.n_planes,
            "depth": net.depth,
            "width": max(net.widths),
        }
    emit(args, summary)
    return 0
