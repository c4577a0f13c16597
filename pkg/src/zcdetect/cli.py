"""Command-line front end.

Every command reads and writes plain JSON (or CSV for ``sweep``). Output is
deterministic: keys keep insertion order and floats are printed with 17
significant digits, so equal inputs and seeds give byte-identical files.
"""
from __future__ import annotations

import argparse
import importlib
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .errors import ZCError
from .matops import matrix_from_json
from .states import (
    BothSeparable,
    DensityMatrix,
    make_ppt_form,
    make_zce,
    random_locals,
    random_rank_two,
    random_separable,
    rank_two_from_density,
    canonicalize,
    state_from_json,
    state_to_json,
)
from .symmetries import CartanParams, conjugation_from_params

# the package re-exports the detect() function under the module's name
det = importlib.import_module(".detect", __package__)

log = logging.getLogger("zcdetect")

EXIT_OK = 0
EXIT_ENTANGLED = 10
EXIT_ZCE = 11
EXIT_INCONCLUSIVE = 12
EXIT_USAGE = 2
EXIT_RANK = 3
EXIT_SWEEP_MISMATCH = 1

TAG_EXIT = {
    det.SEPARABLE_CERTIFIED: EXIT_OK,
    det.ENTANGLED_BY_PPT: EXIT_ENTANGLED,
    det.ENTANGLED_BY_CONCURRENCE: EXIT_ENTANGLED,
    det.ZCE_UNDETECTED: EXIT_ZCE,
    det.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class UsageError(Exception):
    """Bad command-line parameters; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    inp: str | None
    out: str | None
    seed: int
    restarts: int
    fmt: str
    zero_tol: float
    witness_tol: float


# -- deterministic output ------------------------------------------------------

def fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value in output")
    s = "%.17g" % x
    # keep a JSON number that reads back as float
    if all(c in "-0123456789" for c in s):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, level: int = 0) -> str:
    """JSON text with fixed key order and 17-digit floats."""
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_text(obj, prefix: str = "") -> str:
    lines = []
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict) and not {"rows", "cols", "data"} <= set(v):
            lines.append(to_text(v, key + "."))
        elif isinstance(v, (float, np.floating)):
            lines.append(f"{key}: {fmt_float(float(v))}")
        elif isinstance(v, (dict, list)):
            lines.append(f"{key}: {dumps(v, indent=0).replace(chr(10), '')}")
        elif v is None:
            lines.append(f"{key}: -")
        else:
            lines.append(f"{key}: {v}")
    return "\n".join(lines)


def emit(cfg: RunConfig, obj: dict) -> None:
    text = (dumps(obj) if cfg.fmt == "json" else to_text(obj)) + "\n"
    write_text(cfg.out, text)


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def read_json(path: str | None):
    if path is None:
        raise UsageError("--in is required")
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def read_state(path: str | None):
    try:
        return state_from_json(read_json(path))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed state file: {exc}") from exc


# -- commands ------------------------------------------------------------------

def cmd_detect(cfg: RunConfig, args) -> int:
    rho, rank_two = read_state(cfg.inp)
    v = det.detect(rho, cfg.restarts, cfg.seed, cfg.zero_tol, cfg.witness_tol, rank_two=rank_two)
    emit(cfg, v.to_json())
    return TAG_EXIT[v.tag]


def cmd_gen(cfg: RunConfig, args) -> int:
    rng = np.random.default_rng(cfg.seed)
    rank_two = None
    if args.family == "separable":
        if args.terms < 1:
            raise UsageError("--terms must be >= 1")
        rho = random_separable(rng, args.terms)
    elif args.family == "zce":
        if args.q1 is None or not 0.0 < args.q1 < 1.0:
            raise UsageError("zce needs --q1 in (0, 1)")
        x1 = x2 = None
        if args.rotate:
            x1, x2 = random_locals(rng)
        rank_two = make_zce(args.q1, args.phi, x1, x2)
        rho = rank_two.density()
    elif args.family == "pptform":
        if args.tilde is None:
            raise UsageError("pptform needs --tilde FILE")
        obj = read_json(args.tilde)
        try:
            mat = matrix_from_json(obj["matrix"] if "matrix" in obj else obj)
            tilde = DensityMatrix(2, 2, mat)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed two-qubit state: {exc}") from exc
        ok, min_eig = det.ppt_test(tilde)
        if not ok:
            raise UsageError(f"two-qubit block fails PPT (min eigenvalue {min_eig:.6g}); it must be separable")
        rho = make_ppt_form(tilde.mat)
    else:
        rank_two = random_rank_two(rng)
        rho = rank_two.density()
    write_text(cfg.out, dumps(state_to_json(rho, rank_two)) + "\n")
    return EXIT_OK


def cmd_canonical(cfg: RunConfig, args) -> int:
    rho, rank_two = read_state(cfg.inp)
    if (rho.n_a, rho.n_b) != (2, 4):
        raise UsageError("canonical form needs a 2x4 state")
    rank = rho.rank()
    if rank != 2:
        sys.stderr.write(f"error: state has rank {rank}, canonical form needs rank 2\n")
        return EXIT_RANK
    s = rank_two if rank_two is not None else rank_two_from_density(rho)
    cf = canonicalize(s)
    if isinstance(cf, BothSeparable):
        emit(cfg, {"both_separable": True})
        return EXIT_OK
    out = cf.to_json()
    out["residual"] = cf.residual(rho.mat)
    emit(cfg, out)
    return EXIT_OK


def cmd_concurrence(cfg: RunConfig, args) -> int:
    rho, rank_two = read_state(cfg.inp)
    if (rho.n_a, rho.n_b) != (2, 4):
        raise UsageError("the conjugation family acts on 2x4 states")
    if args.params is None:
        raise UsageError("--params FILE is required")
    try:
        p = CartanParams.from_json(read_json(args.params))
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed parameter file: {exc}") from exc
    conj = conjugation_from_params(p)
    value, _ = det.mixed_concurrence_full(rho.mat, conj)
    out = {"concurrence": value, "eta": p.eta, "params": p.to_json()}
    if rho.rank() == 2:
        s = rank_two if rank_two is not None else rank_two_from_density(rho)
        out["concurrence_reduced"] = det.mixed_concurrence_reduced(s, conj)[0]
    emit(cfg, out)
    return EXIT_OK


def cmd_ppt(cfg: RunConfig, args) -> int:
    rho, _ = read_state(cfg.inp)
    ok, min_eig = det.ppt_test(rho)
    emit(cfg, {"ppt": ok, "ppt_min_eig": min_eig})
    return EXIT_OK if ok else EXIT_ENTANGLED


def sweep_rows(q1s, phis, restarts: int, seed: int) -> list[tuple[float, float, float, float]]:
    rows = []
    for q1 in q1s:
        for phi in phis:
            s = make_zce(float(q1), float(phi))
            best = det.max_concurrence_search(s, restarts, seed)
            _, min_eig = det.ppt_test(s.density())
            rows.append((float(q1), float(phi), best.value, min_eig))
    return rows


def cmd_sweep(cfg: RunConfig, args) -> int:
    if not (0.0 < args.q1_min <= args.q1_max < 1.0):
        raise UsageError("q1 bounds must satisfy 0 < q1-min <= q1-max < 1")
    if args.q1_steps < 1 or args.phi_steps < 1 or args.phi_min > args.phi_max:
        raise UsageError("bad grid")
    q1s = np.linspace(args.q1_min, args.q1_max, args.q1_steps)
    phis = np.linspace(args.phi_min, args.phi_max, args.phi_steps)
    rows = sweep_rows(q1s, phis, cfg.restarts, cfg.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q1", "phi", "max_concurrence", "ppt_min_eig"])
    bad = 0
    for row in rows:
        w.writerow([fmt_float(v) for v in row])
        if not (row[2] <= cfg.zero_tol and row[3] < -cfg.witness_tol):
            bad += 1
            log.error("row q1=%s phi=%s is not ZCE-consistent", fmt_float(row[0]), fmt_float(row[1]))
    write_text(cfg.out, buf.getvalue())
    return EXIT_SWEEP_MISMATCH if bad else EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "gen": cmd_gen,
    "canonical": cmd_canonical,
    "concurrence": cmd_concurrence,
    "ppt": cmd_ppt,
    "sweep": cmd_sweep,
}


# -- argument parsing ----------------------------------------------------------

def _int(s: str) -> int:
    return int(s, 0)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inp", help="input JSON file ('-' for stdin)")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=_int, default=det.DEFAULT_SEED, help="RNG seed (default 0xC0FFEE)")
    common.add_argument("--restarts", type=int, default=64, help="random restarts of the concurrence search")
    common.add_argument("--format", dest="fmt", choices=("json", "text"), default="json")
    common.add_argument("--zero-tol", type=float, default=det.ZERO_TOL)
    common.add_argument("--witness-tol", type=float, default=det.WITNESS_TOL)

    p = argparse.ArgumentParser(prog="zcdetect", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("detect", parents=[common], help="classify a state")

    g = sub.add_parser("gen", parents=[common], help="generate a state file")
    g.add_argument("family", choices=("separable", "zce", "pptform", "random"))
    g.add_argument("--terms", type=int, default=3, help="product terms for 'separable'")
    g.add_argument("--q1", type=float, help="Schmidt coefficient for 'zce'")
    g.add_argument("--phi", type=float, default=0.0, help="relative phase for 'zce'")
    g.add_argument("--rotate", action="store_true", help="apply a seeded random local unitary ('zce')")
    g.add_argument("--tilde", help="two-qubit state file for 'pptform'")

    sub.add_parser("canonical", parents=[common], help="local-unitary canonical form of a rank-2 state")
    c = sub.add_parser("concurrence", parents=[common], help="concurrence for one conjugation")
    c.add_argument("--params", help="CartanParams JSON file")
    sub.add_parser("ppt", parents=[common], help="partial-transpose test")

    s = sub.add_parser("sweep", parents=[common], help="search the ZCE family over a (q1, phi) grid")
    s.add_argument("--q1-min", type=float, default=0.1)
    s.add_argument("--q1-max", type=float, default=0.9)
    s.add_argument("--q1-steps", type=int, default=5)
    s.add_argument("--phi-min", type=float, default=0.0)
    s.add_argument("--phi-max", type=float, default=math.pi)
    s.add_argument("--phi-steps", type=int, default=5)
    return p


def _setup_logging() -> None:
    name = os.environ.get("ZC_LOG_LEVEL", "error").lower()
    level = LOG_LEVELS.get(name, logging.ERROR)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    if name not in LOG_LEVELS:
        log.error("unknown ZC_LOG_LEVEL %r, using 'error'", name)


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cfg = RunConfig(args.command, args.inp, args.out, args.seed, args.restarts, args.fmt,
                    args.zero_tol, args.witness_tol)
    if cfg.restarts < 1:
        sys.stderr.write("error: --restarts must be >= 1\n")
        return EXIT_USAGE
    try:
        return COMMANDS[cfg.command](cfg, args)
    except (UsageError, ZCError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
