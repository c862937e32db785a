"""Command-line front end.

Every subcommand writes one JSON document (or a CSV table for ``simulate``
when ``--out`` ends in ``.csv``) that embeds a run manifest.  Output goes to
``--out`` or, without it, to standard output.  A relative ``--out`` is
resolved against ``$POSETRUNS_OUT_DIR`` when that variable is set.

Exit codes: 0 success, 1 validation failure, 2 undetermined classification
under ``--strict``, 3 I/O error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from . import io as pio
from .distributions import Pdf, rate_function
from .downward import classify_downward, lift_down_to_path_space, standard_invariant_G
from .errors import PosetRunsError
from .families import (
    LevelParams,
    grid_closed_forms,
    grid_downward,
    grid_marginal,
    grid_marginal_bruteforce,
    parse_tail,
    success_runs,
)
from .kernels import InvariantFunction, UpwardKernel, Verdict, n_step_distributions
from .montecarlo import SimulationConfig, simulate_excursions
from .poset import PathSpace, check_uniform, enumerate_paths_to, enumerate_poset
from .reversal import reverse
from .upward import classify, lift_to_path_space, standard_invariant_F

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_UNDETERMINED = 2
EXIT_IO = 3
EXIT_USAGE = 64

OUT_DIR_ENV = "POSETRUNS_OUT_DIR"


class UsageError(Exception):
    def __init__(self, message, printed=False):
        super().__init__(message)
        self.printed = printed


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message, printed=True)


def _fraction_list(text):
    try:
        return tuple(Fraction(t) for t in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _int_list(text):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    if text == "":
        return ()
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="posetruns", description="Run chains on discrete posets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, kernel=True):
        p.add_argument("--poset", help="poset JSON file")
        if kernel:
            p.add_argument("--kernel", help="kernel JSON file")
            p.add_argument("--direction", choices=("up", "down"),
                           help="kernel direction (default: from the file, else up)")
        p.add_argument("--depth", type=int, help="enumeration depth for infinite posets")
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--strict", action="store_true",
                       help="require full support; with classify, fail on undetermined")

    p = sub.add_parser("validate", help="check a poset and optionally a kernel")
    common(p)

    p = sub.add_parser("invariant", help="standard invariant function F or G")
    common(p)

    p = sub.add_parser("classify", help="recurrence classification")
    common(p)
    p.add_argument("--tol", type=float, default=1e-9, help="tail tolerance for a verdict")
    p.add_argument("--alpha", type=_float_list,
                   help="success-runs prefix alpha_0,alpha_1,... (instead of --kernel)")
    p.add_argument("--tail", help="success-runs tail: constant:c or power:c,p")

    p = sub.add_parser("reverse", help="time-reverse a kernel")
    common(p)

    p = sub.add_parser("simulate", help="Monte Carlo excursions from the root")
    common(p)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--excursions", type=int, default=10_000)
    p.add_argument("--max-steps", type=int, default=100_000)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("grid-demo", help="closed forms on the grid N^k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rates", type=_fraction_list, required=True)
    p.add_argument("--point", type=_int_list, help="grid point x (default: origin)")
    p.add_argument("--out")

    p = sub.add_parser("levels-demo", help="success-runs chain from alpha prefix and tail")
    p.add_argument("--alpha", type=_float_list, default=())
    p.add_argument("--tail", help="constant:c or power:c,p")
    p.add_argument("--depth", type=int, default=20)
    p.add_argument("--out")

    p = sub.add_parser("paths", help="expand into the tree of covering paths")
    common(p)
    p.add_argument("--steps", type=int, default=0,
                   help="also compare n-step endpoint laws of the lifted kernel up to n")
    return parser


# -- helpers ------------------------------------------------------------------

def _manifest(args) -> dict:
    params = {k: _plain(v) for k, v in sorted(vars(args).items())
              if k not in ("command", "poset", "kernel", "out") and v is not None}
    inputs = {k: getattr(args, k) for k in ("poset", "kernel") if getattr(args, k, None)}
    return {
        "command": args.command,
        "inputs": inputs,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "output": args.out,
        "version": __version__,
    }


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(t) for t in v]
    if isinstance(v, Fraction):
        return str(v)
    return v


def _out_path(out):
    base = os.environ.get(OUT_DIR_ENV)
    if out and base and not os.path.isabs(out):
        return os.path.join(base, out)
    return out


def _emit(args, doc: dict):
    doc = {"manifest": _manifest(args), **doc}
    text = pio.dumps(doc)
    path = _out_path(args.out)
    if path:
        pio.write_text(path, text)
    else:
        sys.stdout.write(text)


def _load_poset(args):
    return pio.load_poset(args.poset) if args.poset else None


def _load_kernel(args, poset=None):
    if not args.kernel:
        raise UsageError("--kernel is required")
    data = pio.read_json(args.kernel)
    if poset is None:
        poset = _load_poset(args)
    kernel = pio.kernel_from_json(data, poset, args.direction, strict=args.strict, depth=args.depth)
    return kernel, data


def _labels(poset, mapping):
    return {poset.label(x): v for x, v in mapping.items()}


def _invariant(kernel, depth):
    if isinstance(kernel, UpwardKernel):
        return standard_invariant_F(kernel, depth)
    return standard_invariant_G(kernel, depth)


def _invariant_doc(kernel, inv: InvariantFunction) -> dict:
    poset = kernel.poset
    return {
        "kind": inv.kind,
        "values": _labels(poset, inv.values),
        "complete": inv.complete,
        "tail_bound": inv.tail_bound,
        "flags": list(inv.flags),
    }


# -- subcommands --------------------------------------------------------------

def cmd_validate(args):
    poset = _load_poset(args)
    doc = {"valid": True}
    if poset is not None:
        doc["poset"] = _poset_summary(poset, args.depth)
    if args.kernel:
        kernel, _ = _load_kernel(args, poset)
        doc["kernel"] = {
            "direction": "up" if isinstance(kernel, UpwardKernel) else "down",
            "rows": len(kernel.domain()),
            "strict": kernel.strict,
            "flags": list(kernel.flags),
        }
        if poset is None:
            doc["poset"] = _poset_summary(kernel.poset, args.depth)
    if poset is None and not args.kernel:
        raise UsageError("validate needs --poset or --kernel")
    _emit(args, doc)
    return EXIT_OK


def _poset_summary(poset, depth):
    if not poset.finite and depth is None:
        return {"finite": False, "root": poset.label(poset.root)}
    en = enumerate_poset(poset, depth)
    levels = check_uniform(poset, depth)
    return {
        "finite": poset.finite,
        "root": poset.label(poset.root),
        "elements": len(en),
        "height": max(en.height.values()),
        "uniform": not hasattr(levels, "lengths"),
        "tree": all(len(poset.down_covers(x)) <= 1 for x in en.order),
    }


def cmd_invariant(args):
    kernel, _ = _load_kernel(args)
    inv = _invariant(kernel, args.depth)
    poset = kernel.poset
    doc = {"direction": "up" if isinstance(kernel, UpwardKernel) else "down",
           inv.kind: _labels(poset, inv.values),
           "complete": inv.complete, "tail_bound": inv.tail_bound, "flags": list(inv.flags)}
    key = "mu_e" if inv.kind == "F" else "nu_e"
    if inv.complete:
        total = inv.total()
        doc[key] = total
        doc["pdf"] = {k: v / total for k, v in doc[inv.kind].items()}
        if isinstance(kernel, UpwardKernel):
            pdf = Pdf({x: v / total for x, v in inv.values.items()})
            rate = rate_function(pdf, poset, args.depth)
            doc["rate"] = _labels(poset, rate.values)
            doc["constant_rate"] = rate.constant
    else:
        doc[key + "_lower"] = inv.total()
    _emit(args, doc)
    return EXIT_OK


def cmd_classify(args):
    if args.tail is not None or args.alpha is not None:
        params = LevelParams(args.alpha or (), parse_tail(args.tail) if args.tail else None)
        depth = args.depth if args.depth is not None else 1000
        cls = success_runs(params, depth).classification
        doc = {"family": "success-runs", **_classification_doc(cls)}
    else:
        kernel, _ = _load_kernel(args)
        if isinstance(kernel, UpwardKernel):
            cls = classify(kernel, args.depth, args.tol)
        else:
            cls = classify_downward(kernel, args.depth, args.tol)
        doc = _classification_doc(cls, kernel.poset)
    _emit(args, doc)
    if args.strict and cls.verdict == Verdict.UNDETERMINED:
        return EXIT_UNDETERMINED
    return EXIT_OK


def _classification_doc(cls, poset=None):
    doc = {
        "verdict": str(cls.verdict),
        "depth": cls.depth,
        "mean_return": cls.mean_return,
        "bounds": list(cls.bounds),
        "partial_sum": cls.partial_sum,
        "evidence": cls.evidence,
    }
    if poset is not None and cls.invariant_pdf is not None:
        doc["invariant_pdf"] = _labels(poset, cls.invariant_pdf)
        doc["mean_return_times"] = _labels(poset, cls.mean_return_times)
    return doc


def cmd_reverse(args):
    kernel, data = _load_kernel(args)
    inv = None
    if isinstance(data, dict) and isinstance(data.get("invariant"), dict):
        supplied = data["invariant"]
        values = supplied.get("values", supplied)
        poset = kernel.poset
        parsed = {poset.parse(k): float(v) for k, v in values.items()}
        inv = InvariantFunction(parsed, "F" if isinstance(kernel, UpwardKernel) else "G",
                                args.depth, bool(supplied.get("complete", poset.finite)))
    report = reverse(kernel, inv, args.depth)
    target = report.target
    elements = target.domain() if target.explicit else tuple(report.invariant.values)
    doc = pio.kernel_to_json(target, elements)
    doc["invariant"] = _invariant_doc(target, report.invariant)
    doc["max_row_defect"] = report.max_row_defect
    doc["flags"] = list(report.flags)
    _emit(args, doc)
    return EXIT_OK


def cmd_simulate(args):
    kernel, _ = _load_kernel(args)
    config = SimulationConfig(args.seed, args.excursions, args.max_steps)
    stats = simulate_excursions(kernel, config, workers=args.workers)
    poset = kernel.poset
    order = [x for x in enumerate_poset(poset, args.depth).order] if poset.finite else \
        sorted(stats.hits, key=poset.label)
    estimates = {poset.label(x): stats.hit_probability(x) for x in order}
    widths = {poset.label(x): stats.half_width(x) for x in order}
    out = _out_path(args.out)
    if out and out.endswith(".csv"):
        rows = [(k, estimates[k], widths[k]) for k in estimates]
        rows.append(("mean_return_time", stats.mean_return_time(), stats.return_time_half_width()))
        pio.write_csv(out, ["label", "estimate", "half_width"], rows)
        return EXIT_OK
    doc = {
        "estimates": estimates,
        "half_widths": widths,
        "mean_return_time": stats.mean_return_time(),
        "mean_return_time_half_width": stats.return_time_half_width(),
        "excursions": stats.excursions,
        "truncated_count": stats.truncated,
        "seed": stats.seed,
        "generator_id": stats.generator_id,
        "renormalization": stats.renormalization,
    }
    _emit(args, doc)
    return EXIT_OK


def cmd_grid_demo(args):
    k, rates = args.k, args.rates
    if len(rates) != k:
        raise UsageError(f"--rates needs {k} values")
    x = args.point if args.point is not None else (0,) * k
    if len(x) != k or any(c < 0 for c in x):
        raise UsageError(f"--point needs {k} nonnegative integers")
    closed = grid_closed_forms(k, rates, x)
    marginals = []
    flags = []
    for i in range(1, k + 1):
        m = grid_marginal(i, rates)
        oracle = grid_marginal_bruteforce(i, [float(r) for r in rates], 0, 200)
        marginals.append({
            "i": i,
            "marginal_param_oracle": m.parameter,
            "marginal_param_printed": m.printed,
            "ratio": m.ratio,
            "pmf_0_bruteforce": oracle,
            "consistent": m.consistent,
        })
        flags.extend(f"{f}:{i}" for f in m.flags)
    doc = {
        "k": k,
        "rates": [str(r) for r in rates],
        "point": list(x),
        "C": closed.C,
        "F": closed.F,
        "f": closed.f,
        "exact": {"F": str(closed.F), "f": str(closed.f)},
        "downward": {str(i + 1): grid_downward(x, i + 1) for i in range(k)} if sum(x) else {},
        "marginals": marginals,
        "verdicts": {"upward": str(Verdict.POSITIVE_RECURRENT)},
        "discrepancy_flags": flags,
    }
    _emit(args, doc)
    return EXIT_OK


def cmd_levels_demo(args):
    params = LevelParams(args.alpha, parse_tail(args.tail) if args.tail else None)
    res = success_runs(params, args.depth)
    doc = {
        "alpha_prefix": list(params.prefix),
        "tail": str(params.tail) if params.tail else None,
        "F_hat": list(res.values),
        "mu_0": res.mu,
        **_classification_doc(res.classification),
    }
    _emit(args, doc)
    return EXIT_OK


def cmd_paths(args):
    poset = _load_poset(args)
    kernel = None
    if args.kernel:
        kernel, _ = _load_kernel(args, poset)
        poset = kernel.poset
    if poset is None:
        raise UsageError("paths needs --poset or --kernel")
    en = enumerate_poset(poset, args.depth)
    paths = {poset.label(x): [PathSpace(poset).label(a) for a in enumerate_paths_to(poset, x)]
             for x in en.order}
    doc = {"paths": paths, "uniform": not hasattr(check_uniform(poset, args.depth), "lengths")}
    if kernel is not None and args.steps:
        if isinstance(kernel, UpwardKernel):
            lifted = lift_to_path_space(kernel)
        else:
            lifted = lift_down_to_path_space(kernel, args.depth)
        gaps = []
        base = n_step_distributions(kernel, kernel.root, args.steps)
        up = n_step_distributions(lifted, lifted.root, args.steps)
        for b, l in zip(base, up):
            pushed = {}
            for a, p in l.items():
                pushed[a.end] = pushed.get(a.end, 0) + p
            keys = set(b) | set(pushed)
            gaps.append(max((abs(b.get(z, 0) - pushed.get(z, 0)) for z in keys), default=0.0))
        doc["endpoint_law_max_difference"] = gaps
    _emit(args, doc)
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "invariant": cmd_invariant,
    "classify": cmd_classify,
    "reverse": cmd_reverse,
    "simulate": cmd_simulate,
    "grid-demo": cmd_grid_demo,
    "levels-demo": cmd_levels_demo,
    "paths": cmd_paths,
}


def run(argv=None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        if not exc.printed:
            parser.print_usage(sys.stderr)
            sys.stderr.write(f"posetruns: error: {exc}\n")
        return EXIT_USAGE
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        sys.stderr.write(f"posetruns: I/O error: {exc}\n")
        return EXIT_IO
    except (PosetRunsError, ValueError) as exc:
        sys.stderr.write(f"posetruns: {type(exc).__name__}: {exc}\n")
        return EXIT_VALIDATION


def main():  # pragma: no cover - console entry point
    sys.exit(run())
