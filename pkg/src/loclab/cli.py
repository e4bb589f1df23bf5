"""Command-line front end.

    loclab check   <family>  [--seed N] [--trials N] [--tol X] [--env-dims 1,2,3]
    loclab extract <family>  [same flags]
    loclab gisin   <map>     [--dim D] [--pairs N] [--seed N]
    loclab zoo list | zoo describe <name>

``<family>`` / ``<map>`` is a JSON spec path or ``zoo:<name>``. Reports are
JSON on stdout (``--format text`` for a summary). Exit codes: 0 pass, 1
violation found, 2 bad input. Identical inputs, flags and seed give
byte-identical reports; ``--timing`` adds wall-clock duration and so gives up
that guarantee.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .errors import LoclabError
from .gisin import (
    MAP_ZOO,
    build_steering_scenario,
    convex_linearity_gap,
    indistinguishable_pairs,
    linear_map,
    map_zoo,
    nonlinearity_witness,
    scenario_gaps,
    signaling_gap,
)
from .latrans import SamplingConfig, TransFamily, check_all, family_from_spec, zoo
from .latrans.zoo import ZOO
from .reconstruct import certify
from .linalg import matrix_from_json

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("LOCLAB_SEED")
    if raw is None:
        return 0
    try:
        seed = int(raw)
    except ValueError:
        raise InputError(f"LOCLAB_SEED must be an integer, got {raw!r}") from None
    if not 0 <= seed < 2**64:
        raise InputError("LOCLAB_SEED must be an unsigned 64-bit integer")
    return seed


def _env_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --env-dims {text!r}") from None
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("--env-dims needs positive integers")
    return dims


def _u64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text), hashlib.sha256(text.encode()).hexdigest()
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None


def _zoo_params(name: str, args) -> dict:
    dim = getattr(args, "dim", None)
    params = {}
    if name in ("constant_pure", "constant_mixed"):
        if dim is not None:
            params.update(dim_in=dim, dim_out=dim)
    elif dim is not None:
        params["dim"] = dim
    if name == "nonlinear_phase" and args.theta is not None:
        params["theta"] = args.theta
    return params


def load_family(spec: str, args) -> tuple[TransFamily, dict]:
    if spec.startswith("zoo:"):
        name = spec[4:]
        params = _zoo_params(name, args)
        return zoo(name, **params), {"spec": spec, "params": params}
    obj, digest = _read_json(spec)
    return family_from_spec(obj), {"spec": spec, "sha256": digest}


def load_map(spec: str, args):
    if spec.startswith("zoo:"):
        name = spec[4:]
        params = {}
        if args.dim is not None:
            params["dim"] = args.dim
        if name == "nonlinear_phase" and args.theta is not None:
            params["theta"] = args.theta
        return map_zoo(name, **params), {"spec": spec, "params": params}
    obj, digest = _read_json(spec)
    if not isinstance(obj, dict):
        raise InputError("map spec must be a JSON object")
    if obj.get("kind") == "zoo":
        f = map_zoo(str(obj.get("name")), **(obj.get("params") or {}))
    elif obj.get("kind") in ("unitary", "isometry"):
        mats = obj.get("matrices")
        if not isinstance(mats, list) or len(mats) != 1:
            raise InputError("linear map spec needs exactly one matrix")
        f = linear_map(matrix_from_json(mats[0]))
    else:
        raise InputError(f"map spec kind must be unitary, isometry or zoo, got {obj.get('kind')!r}")
    return f, {"spec": spec, "sha256": digest}


def _config(args) -> SamplingConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return SamplingConfig(trials=args.trials, env_dims=args.env_dims, seed=seed, tolerance=args.tol)


def _manifest(command: str, inputs: list, config: dict, started: float, timing: bool) -> dict:
    out = {"command": command, "inputs": inputs, "config": config, "tool_version": __version__}
    if timing:
        out["duration_s"] = round(time.perf_counter() - started, 6)
    return out


def _emit(report: dict, fmt: str, text_lines: list[str]):
    if fmt == "json":
        sys.stdout.write(json.dumps(report, indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


def cmd_check(args) -> int:
    started = time.perf_counter()
    family, source = load_family(args.family, args)
    cfg = _config(args)
    report = check_all(family, cfg)
    out = {"manifest": _manifest("check", [source], cfg.to_json(), started, args.timing),
           "family": family.label(), **report.to_json()}
    lines = [f"family: {family.label()}  verdict: {report.verdict}"]
    lines += [f"  {k}: max violation {v:.3e}" for k, v in report.max_violation.items()]
    lines += [f"  witness: {w.axiom} [{w.kind}] gap={w.gap:.3e} env_dim={w.env_dim} {w.message}"
              for w in report.witnesses]
    _emit(out, args.format, lines)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_extract(args) -> int:
    started = time.perf_counter()
    family, source = load_family(args.family, args)
    cfg = _config(args)
    cert = certify(family, cfg)
    out = {"manifest": _manifest("extract", [source], cfg.to_json(), started, args.timing),
           "family": family.label(), **cert.to_json()}
    lines = [f"family: {family.label()}  verdict: {cert.verdict}  classification: {cert.classification}"]
    for key in ("isometry_defect", "cp_defect", "tp_defect"):
        val = getattr(cert, key)
        if val is not None:
            lines.append(f"  {key}: {val:.3e}")
    lines.append(f"  equivalence_max_gap: {cert.equivalence.max_gap:.3e}")
    lines += [f"  note: {n}" for n in cert.notes]
    _emit(out, args.format, lines)
    return EXIT_OK if cert.locally_applicable else EXIT_VIOLATION


def cmd_gisin(args) -> int:
    started = time.perf_counter()
    f, source = load_map(args.map, args)
    seed = args.seed if args.seed is not None else _default_seed()
    dim = f.dim_in if args.dim is None else args.dim
    if dim != f.dim_in:
        raise InputError(f"map acts on dimension {f.dim_in}, but --dim {dim} was given")
    convex = convex_linearity_gap(f, dim, args.pairs, seed)
    signal, canonical_signal, invariants = 0.0, None, {}
    for e1, e2 in indistinguishable_pairs(dim, args.pairs, seed):
        sc = build_steering_scenario(e1, e2)
        gap = signaling_gap(f, sc)
        if canonical_signal is None:
            canonical_signal = gap
        signal = max(signal, gap)
        for k, v in scenario_gaps(sc).items():
            invariants[k] = max(invariants.get(k, 0.0), float(v))
    witness = nonlinearity_witness(f, tol=args.tol, seed=seed)
    config = {"dim": dim, "pairs": args.pairs, "seed": seed, "tolerance": args.tol}
    out = {
        "manifest": _manifest("gisin", [source], config, started, args.timing),
        "map": f.name or f.kind,
        "convex_linearity_gap": convex,
        "signaling_gap": {"canonical_scenario": canonical_signal, "max_over_scenarios": signal},
        "scenario_invariant_max_gap": invariants,
        "nonlinearity": witness.to_json(),
    }
    lines = [
        f"map: {f.name or f.kind}  dim: {dim}",
        f"  convex_linearity_gap: {convex:.3e}",
        f"  max signaling gap: {signal:.3e}",
        f"  linearizable: {witness.is_linearizable}",
    ]
    if witness.witness:
        lines.append(f"  witness: {witness.witness['message']}")
    _emit(out, args.format, lines)
    return EXIT_OK


def zoo_catalog() -> list[dict]:
    entries = [
        {"name": e.name, "category": "family", "theory": e.theory.value, "summary": e.summary,
         "anchor": e.anchor, "expected": e.expected}
        for e in ZOO.values()
    ]
    entries += [
        {"name": name, "category": "map", "theory": "pure", "summary": summary}
        for name, (_, summary) in MAP_ZOO.items()
    ]
    return sorted(entries, key=lambda e: (e["category"], e["name"]))


def cmd_zoo(args) -> int:
    catalog = zoo_catalog()
    if args.action == "list":
        _emit({"zoo": catalog}, args.format,
              [f"{e['category']:6s} {e['name']:16s} {e['summary']}" for e in catalog])
        return EXIT_OK
    if not args.name:
        raise InputError("zoo describe needs a name")
    matches = [e for e in catalog if e["name"] == args.name.removeprefix("zoo:")]
    if not matches:
        raise InputError(f"unknown zoo entry {args.name!r}")
    _emit({"entries": matches}, args.format,
          [f"{k}: {v}" for e in matches for k, v in e.items()])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loclab", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"loclab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=_u64, default=None, help="RNG seed (default: $LOCLAB_SEED or 0)")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--timing", action="store_true", help="record wall-clock duration")
        p.add_argument("--theta", type=float, default=None, help="angle for nonlinear_phase")
        p.add_argument("--dim", type=int, default=None, help="dimension for zoo entries")

    for name, fn, help_ in (("check", cmd_check, "run the three axiom checks"),
                            ("extract", cmd_extract, "extract and certify the linear representative")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("family", help="family spec JSON path or zoo:<name>")
        common(p)
        p.add_argument("--trials", type=int, default=200)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--env-dims", type=_env_dims, default=(1, 2, 3, 4))
        p.set_defaults(func=fn)

    p = sub.add_parser("gisin", help="convex linearity, signaling and linearity analysis")
    p.add_argument("map", help="map spec JSON path or zoo:<name>")
    common(p)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_gisin)

    p = sub.add_parser("zoo", help="list or describe built-in candidates")
    p.add_argument("action", choices=("list", "describe"))
    p.add_argument("name", nargs="?")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_zoo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        if getattr(args, "trials", 1) < 1 or getattr(args, "pairs", 1) < 1:
            raise InputError("--trials and --pairs must be positive")
        if getattr(args, "dim", None) is not None and args.dim < 1:
            raise InputError("--dim must be positive")
        return args.func(args)
    except (InputError, LoclabError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"loclab {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
