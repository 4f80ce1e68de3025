"""Command-line surface: one subcommand per operation family.

Every run emits a report envelope: the echoed config, the package version,
wall-clock seconds, a status in {ok, precondition-failed, resource-limit},
and the subcommand payload.  Exit code is 0 exactly when status is ok
(precondition failures exit 2, resource limits exit 3).

Seeded subcommands use numpy's PCG64 generator; with --threads 1 (the
default) every output is deterministic for a fixed seed, and CSV outputs
are byte-identical across reruns (JSON envelopes differ only in the
wall_time_s field).  Complex numbers serialize as {"re": ..., "im": ...}.
The KLSUMS_OUT_DIR environment variable, when set, is prepended to
relative --out paths; there is no other environment dependence.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .bilinear import (
    CoeffSeq,
    averaged_comparison_empty,
    averaged_comparison_full_sample,
    averaged_comparison_power_sum,
    bilinear_form,
    moment_identity_check,
    theorem_bounds,
)
from .chartuples import CharTuple, classify_tuple
from .errors import (
    DegenerateFiberError,
    NumericalInstabilityError,
    PreconditionError,
    ResourceLimitError,
)
from .experiments import bound_ladder
from .field import MultChar, build_field, gauss_sum
from .kloosterman import kl_table_fast, kl_table_naive, fourier_identity_check, table_agreement
from .strata import box_count_variety, stratum_scan, z_fiber_count
from .sums import sigma_II

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3


def _jsonify(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonify(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return _jsonify(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(x) for x in obj]
    return obj


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _chars_arg(field, text: str, k: int | None) -> CharTuple:
    idx = _parse_ints(text)
    if k is not None and len(idx) != k:
        raise PreconditionError(f"expected {k} character indices, got {len(idx)}")
    return CharTuple(field, tuple(idx))


def _resolve_out(path: str | None):
    if path is None:
        return None
    out_dir = os.environ.get("KLSUMS_OUT_DIR")
    if out_dir and not os.path.isabs(path):
        return os.path.join(out_dir, path)
    return path


# -- subcommand payload builders -------------------------------------------


def _cmd_field_info(args) -> dict:
    f = build_field(args.q)
    return {"q": f.q, "g": f.g, "units": f.q - 1}


def _cmd_char_classify(args) -> dict:
    f = build_field(args.q)
    t = _chars_arg(f, args.chars, args.k)
    return classify_tuple(t).to_json()


def _cmd_kl_table(args) -> dict:
    f = build_field(args.q)
    t = _chars_arg(f, args.chars, args.k)
    build = kl_table_naive if args.method == "naive" else kl_table_fast
    table = build(f, t, args.scale)
    rows = [(x, float(table.values[x].real), float(table.values[x].imag)) for x in range(1, f.q)]
    return {
        "q": f.q,
        "k": t.k,
        "chars": list(t.indices),
        "scale": args.scale,
        "max_abs": table.max_abs(),
        "rows": rows,
    }


def _cmd_kl_verify(args) -> dict:
    f = build_field(args.q)
    t = _chars_arg(f, args.chars, args.k)
    fast = kl_table_fast(f, t, args.scale)
    naive = kl_table_naive(f, t, args.scale)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    fourier_max = 0.0
    if args.scale % f.q == 1:
        for _ in range(args.n_lambda):
            lam = MultChar(f, int(rng.integers(0, f.q - 1)))
            _, _, diff = fourier_identity_check(fast, lam)
            fourier_max = max(fourier_max, diff)
    return {
        "q": f.q,
        "k": t.k,
        "chars": list(t.indices),
        "scale": args.scale,
        "max_rel_diff": table_agreement(fast, naive),
        "deligne_max": fast.max_abs(),
        "deligne_bound": t.k,
        "fourier_checks": args.n_lambda if args.scale % f.q == 1 else 0,
        "fourier_max_diff": fourier_max,
    }


def _cmd_complete_sum(args) -> dict:
    f = build_field(args.q)
    t = _chars_arg(f, args.chars, args.k)
    b = _parse_ints(args.b)
    if args.l is not None and len(b) != 2 * args.l:
        raise PreconditionError(f"b must have 2*l = {2 * args.l} entries, got {len(b)}")
    table = kl_table_fast(f, t, args.scale)
    rep = sigma_II(table, b, direct=args.direct)
    payload = {
        "q": f.q,
        "k": t.k,
        "chars": list(t.indices),
        "scale": args.scale,
        "b": rep.b,
        "l": rep.l,
        "sigma_I": rep.sigma_I,
        "sigma_II": rep.sigma_II,
        "comp_R2": rep.comp_R2,
        "comp_K2": rep.comp_K2,
        "sigma_II_direct": rep.sigma_II_direct,
        "ratio_I": rep.ratio_I,
        "ratio_II": rep.ratio_II,
    }
    if args.stratum:
        payload["z_count"] = z_fiber_count(f, t.k, b).z_count
    return payload


def _cmd_strata_scan(args) -> dict:
    f = build_field(args.q)
    res = stratum_scan(
        f,
        args.k,
        args.l,
        samples=args.samples,
        seed=args.seed,
        exhaustive=args.exhaustive,
        threads=args.threads,
    )
    return {
        "q": f.q,
        "k": args.k,
        "l": args.l,
        "seed": args.seed,
        "exhaustive": args.exhaustive,
        "histogram": {str(z): c for z, c in sorted(res.histogram.items())},
        "generic": res.generic,
        "generic_fraction": res.generic_fraction(),
        "rows": [rep.row() for rep in res.reports],
    }


def _cmd_box_count(args) -> dict:
    f = build_field(args.q)
    predicate = "diagonal" if args.predicate == "diagonal" else []
    count = box_count_variety(f, predicate, args.box, args.l)
    return {
        "q": f.q,
        "l": args.l,
        "B": args.box,
        "predicate": args.predicate,
        "count": count,
        "count_over_B_pow_l": count / args.box**args.l if args.box else None,
    }


def _cmd_bound_check(args) -> dict:
    primes = _parse_ints(args.primes)
    chars = tuple(_parse_ints(args.chars)) if args.chars else None
    rep = bound_ladder(
        primes,
        k=args.k,
        l=args.l,
        chars=chars,
        samples=args.samples,
        subgeneric_samples=args.subgeneric_samples,
        seed=args.seed,
    )
    return rep.to_json()


def _cmd_bilinear_bench(args) -> dict:
    f = build_field(args.q)
    t = _chars_arg(f, args.chars, args.k)
    table = kl_table_fast(f, t, args.scale)
    if args.random_coeffs:
        rng = np.random.Generator(np.random.PCG64(args.seed))
        alpha = CoeffSeq(np.arange(1, args.M + 1), rng.standard_normal(args.M))
        beta = CoeffSeq(np.arange(1, args.N + 1), rng.standard_normal(args.N))
    else:
        alpha, beta = CoeffSeq.ones(args.M), CoeffSeq.ones(args.N)
    val = bilinear_form(table, alpha, beta)
    rep = theorem_bounds(
        f.q,
        args.M,
        args.N,
        args.l,
        k=t.k,
        alpha_l1=alpha.l1,
        alpha_l2=alpha.l2,
        beta_l2=beta.l2,
        m_plus=alpha.m_plus,
        kind=args.kind,
    )
    rep.computed = abs(val)
    out = rep.to_json()
    out.update({"chars": list(t.indices), "scale": args.scale, "B_value": val, "seed": args.seed})
    return out


def _cmd_moment_check(args) -> dict:
    f = build_field(args.q)
    xi = MultChar(f, args.xi)
    lhs, rhs, diff = moment_identity_check(f, xi, args.n)
    return {
        "q": f.q,
        "xi": xi.a,
        "n": args.n,
        "lhs": lhs,
        "rhs": rhs,
        "abs_diff": diff,
        "epsilon_trivial": gauss_sum(MultChar(f, 0)).real / f.q**0.5,
    }


def _cmd_avg_compare(args) -> dict:
    if args.family == "empty":
        return averaged_comparison_empty().to_json()
    f = build_field(args.q)
    t = _chars_arg(f, args.chars, args.k)
    table = kl_table_fast(f, t)
    if args.family == "power-sum":
        rep = averaged_comparison_power_sum(table, args.n, args.m)
    else:
        rep = averaged_comparison_full_sample(table, args.l, args.count, seed=args.seed)
    return rep.to_json()


# -- emission ----------------------------------------------------------------


def _emit_csv(payload: dict, config: dict, stream) -> None:
    writer = csv.writer(stream, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    for key in sorted(config):
        stream.write(f"# {key}={config[key]}\n")
    if "rows" in payload and config.get("subcommand") == "kl-table":
        writer.writerow(["x", "re", "im"])
        for x, re_, im_ in payload["rows"]:
            writer.writerow([x, repr(re_), repr(im_)])
    elif "rows" in payload and config.get("subcommand") == "strata-scan":
        twol = 2 * config["l"]
        writer.writerow([f"b_{i + 1}" for i in range(twol)] + ["deg_P", "z_count", "generic"])
        for row in payload["rows"]:
            writer.writerow(row)
    else:
        raise PreconditionError(f"no CSV schema for subcommand {config.get('subcommand')!r}")


def emit(payload: dict, config: dict, status: str, wall: float, fmt: str, stream) -> None:
    """Write the report envelope (JSON) or the subcommand's CSV schema."""
    if fmt == "csv":
        _emit_csv(payload, config, stream)
        return
    envelope = {
        "config": config,
        "version": __version__,
        "wall_time_s": wall,
        "status": status,
        "payload": payload,
    }
    json.dump(_jsonify(envelope), stream, indent=1, sort_keys=True)
    stream.write("\n")


_COMMANDS = {
    "field-info": _cmd_field_info,
    "char-classify": _cmd_char_classify,
    "kl-table": _cmd_kl_table,
    "kl-verify": _cmd_kl_verify,
    "complete-sum": _cmd_complete_sum,
    "strata-scan": _cmd_strata_scan,
    "box-count": _cmd_box_count,
    "bound-check": _cmd_bound_check,
    "bilinear-bench": _cmd_bilinear_bench,
    "moment-check": _cmd_moment_check,
    "avg-compare": _cmd_avg_compare,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klsums",
        description="Generalized Kloosterman sums, complete sum-product sums, "
        "and stratification experiments over prime fields.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=None)
        p.add_argument("--seed", type=int, default=0, help="PRNG seed (numpy PCG64)")
        p.add_argument("--threads", type=int, default=1)
        return p

    p = add("field-info", help="build F_q and report the primitive root")
    p.add_argument("--q", type=int, required=True)

    p = add("char-classify", help="classify a character tuple (Kummer/NIO/CGM)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--chars", required=True, help="comma-separated indices mod q-1")

    p = add("kl-table", help="emit the full Kl_k table (CSV: x,re,im)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--chars", required=True)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--method", choices=("fast", "naive"), default="fast")

    p = add("kl-verify", help="fast vs naive agreement + Fourier identity + Deligne bound")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--chars", required=True)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--n-lambda", type=int, default=20)

    p = add("complete-sum", help="Sigma_I / Sigma_II for one b")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--chars", required=True)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--b", required=True, help="comma-separated 2l field elements")
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--direct", action="store_true", help="also run the O(q^3) direct oracle")
    p.add_argument("--stratum", action="store_true", help="attach z_count (needs q = 1 mod k)")

    p = add("strata-scan", help="histogram of z_count over sampled b")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--exhaustive", action="store_true")

    p = add("box-count", help="points of a variety in the box [B,2B)^{2l}")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--box", type=int, required=True, metavar="B")
    p.add_argument("--predicate", choices=("diagonal", "empty"), default="diagonal")

    p = add("bound-check", help="prime-ladder Sigma_I/Sigma_II ratio experiment")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--chars", default=None)
    p.add_argument("--primes", default="101,151,211,307,401,499")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--subgeneric-samples", type=int, default=20)

    p = add("bilinear-bench", help="B(K, alpha, beta) against the bound formulas")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--chars", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--kind", choices=("I", "II"), default="II")
    p.add_argument("--random-coeffs", action="store_true")

    p = add("moment-check", help="even-character Gauss-sum / Kl_3 moment identity")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--xi", type=int, default=0, help="index of the even character xi")
    p.add_argument("--n", type=int, default=1)

    p = add("avg-compare", help="averaged comparison over a b-family")
    p.add_argument("--q", type=int, default=29)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--chars", default="0,0")
    p.add_argument("--family", choices=("power-sum", "full-sample", "empty"), required=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--l", type=int, default=2)
    p.add_argument("--count", type=int, default=50)

    return parser


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    config = {k: v for k, v in vars(args).items() if k not in ("out", "format")}
    fmt = args.format or ("csv" if args.subcommand in ("kl-table", "strata-scan") else "json")
    t0 = time.perf_counter()
    try:
        payload = _COMMANDS[args.subcommand](args)
        status, code = "ok", EXIT_OK
    except (PreconditionError, DegenerateFiberError, NumericalInstabilityError) as exc:
        payload, status, code = {"error": str(exc)}, "precondition-failed", EXIT_PRECONDITION
    except ResourceLimitError as exc:
        payload, status, code = {"error": str(exc)}, "resource-limit", EXIT_RESOURCE
    wall = time.perf_counter() - t0
    if status != "ok":
        fmt = "json"
    buf = io.StringIO()
    emit(payload, config, status, wall, fmt, buf)
    out_path = _resolve_out(args.out)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(buf.getvalue())
    else:
        stdout.write(buf.getvalue())
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
