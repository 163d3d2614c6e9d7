"""Command-line front end: ``blockenc build|verify|qsp|walk``.

Exit codes: 0 success, 1 verification failed, 2 usage or config error,
3 infeasible parameters, 4 phase solver failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import herm_enc, qsp, sparse_enc, walk
from .drawing import draw_ascii
from .errors import InfeasibleParametersError, InvalidTargetError, PhaseSolverError
from .qasm import to_qasm
from .qcore import (
    DEFAULT_TOL,
    BlockEncoding,
    circuit_unitary,
    encoding_error,
    perturb_first_rotation,
    unitarity_residual,
)

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_SOLVER = 0, 1, 2, 3, 4

CONFIG_KEYS = {
    "family", "scheme", "n", "alpha", "beta", "gamma", "k", "degree",
    "tolerance", "oc_ordering", "oa_style", "output_dir",
}
FAMILIES = ("circulant", "tridiagonal", "ebtree", "sym2x2", "walk")
SCHEMES = ("standard", "hermitian")
_INT_KEYS = {"n", "k", "degree"}
_FLOAT_KEYS = {"alpha", "beta", "gamma", "tolerance"}


class ConfigError(ValueError):
    pass


# -- configuration -----------------------------------------------------------


def parse_config_text(text: str) -> dict:
    """JSON object or flat ``key=value`` lines (``#`` starts a comment)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON config: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("JSON config must be an object")
        return data
    data = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        data[key] = value
    return data


def normalize_config(raw: dict) -> dict:
    unknown = set(raw) - CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = {}
    for key, value in raw.items():
        if value is None:
            continue
        try:
            if key in _INT_KEYS:
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError
                cfg[key] = int(value)
            elif key in _FLOAT_KEYS:
                cfg[key] = float(value)
            else:
                cfg[key] = str(value)
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    if "family" not in cfg:
        raise ConfigError("missing required key: family")
    if cfg["family"] not in FAMILIES:
        raise ConfigError(f"family must be one of {', '.join(FAMILIES)}")
    cfg.setdefault("scheme", "standard")
    if cfg["scheme"] not in SCHEMES:
        raise ConfigError(f"scheme must be one of {', '.join(SCHEMES)}")
    if cfg["scheme"] == "hermitian" and cfg["family"] != "circulant":
        raise ConfigError("the hermitian scheme is available for family=circulant only")
    fam = cfg["family"]
    if fam == "sym2x2":
        required = ("alpha", "beta")
        cfg.setdefault("n", 1)
    elif fam == "walk" or cfg["scheme"] == "hermitian":
        required = ("n", "alpha", "beta")
        cfg.setdefault("gamma", cfg.get("beta"))
    else:
        required = ("n", "alpha", "beta", "gamma")
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")
    if fam == "walk":
        cfg.setdefault("k", 1)
        if cfg["k"] < 1:
            raise ConfigError("k must be at least 1")
    return cfg


def default_tolerance() -> float:
    env = os.environ.get("BLOCKENC_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise ConfigError(f"BLOCKENC_TOL is not a number: {env!r}") from None
    return DEFAULT_TOL


# -- construction ------------------------------------------------------------


@dataclass
class Built:
    cfg: dict
    encoding: BlockEncoding
    target: np.ndarray
    target_label: str


def build_encoding(cfg: dict) -> Built:
    fam = cfg["family"]
    try:
        if fam in ("circulant", "tridiagonal") and cfg["scheme"] == "hermitian":
            be = herm_enc.hermitian_circulant_encoding(cfg["alpha"], cfg["beta"], cfg["n"], cfg.get("gamma"))
            target = sparse_enc.circulant_matrix(cfg["n"], cfg["alpha"], cfg["beta"], cfg["beta"])
            label = "A/4"
        elif fam in ("circulant", "tridiagonal"):
            p = sparse_enc.CirculantParams(
                cfg["n"], cfg["alpha"], cfg["beta"], cfg["gamma"],
                variant="tridiagonal" if fam == "tridiagonal" else "cyclic",
                oc_ordering=cfg.get("oc_ordering", "cjlcyc2"),
                oa_style=cfg.get("oa_style", "multi_controlled"),
            )
            be, target, label = sparse_enc.circulant_encoding(p), p.matrix(), "A/4"
        elif fam == "ebtree":
            p = sparse_enc.EbtreeParams(cfg["n"], cfg["alpha"], cfg["beta"], cfg["gamma"])
            be, target, label = sparse_enc.ebtree_encoding(p), p.matrix(), "A/8"
        elif fam == "sym2x2":
            if cfg["n"] != 1:
                raise ConfigError("sym2x2 has n = 1")
            p = sparse_enc.Sym2x2Params(cfg["alpha"], cfg["beta"])
            be, target, label = sparse_enc.sym2x2_encoding(p), p.matrix(), "A/2"
        else:
            w = walk.up_encoding(cfg["alpha"], cfg["beta"], cfg["gamma"], cfg["n"])
            be = walk.walk_operator(w, cfg["k"])
            target = qsp.matrix_poly([0] * cfg["k"] + [1], w.p)
            label = f"T_{cfg['k']}(P)"
    except (InfeasibleParametersError, ConfigError):
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return Built(cfg, be, target, label)


def build_metadata(b: Built) -> dict:
    be = b.encoding
    meta = {
        "family": b.cfg["family"],
        "scheme": b.cfg["scheme"],
        "n": be.n,
        "m": be.m,
        "scale": be.scale,
        "width": be.width,
        "gate_count": len(be.circuit),
        "hermitian": be.hermitian,
        "block_target": b.target_label,
    }
    for key in ("alpha", "beta", "gamma", "k", "oc_ordering", "oa_style"):
        if key in b.cfg:
            meta[key] = b.cfg[key]
    return meta


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_bundle(b: Built, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    meta = build_metadata(b)
    (out / "circuit.qasm").write_text(to_qasm(b.encoding.circuit, meta), encoding="utf-8")
    (out / "circuit.txt").write_text(draw_ascii(b.encoding.circuit), encoding="utf-8")
    (out / "report.json").write_text(_dump_json(meta), encoding="utf-8")


def verify_report(b: Built, tol: float) -> dict:
    start = time.perf_counter()
    be = b.encoding
    u = circuit_unitary(be.circuit)
    err = encoding_error(be, b.target)
    return {
        "family": b.cfg["family"],
        "n": be.n,
        "m": be.m,
        "scale": be.scale,
        "spectral_error": err,
        "hermitian": be.hermitian,
        "unitarity_residual": unitarity_residual(u),
        "gate_count": len(be.circuit),
        "wall_time_ms": round((time.perf_counter() - start) * 1000.0, 3),
        "tolerance": tol,
        "passed": bool(err <= tol),
    }


# -- commands ------------------------------------------------------------------


def _config_from_args(args) -> dict:
    raw = {}
    if getattr(args, "config", None):
        try:
            raw.update(parse_config_text(Path(args.config).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    return raw


def _prepare(raw: dict, perturb: float | None) -> Built:
    cfg = normalize_config(raw)
    b = build_encoding(cfg)
    if perturb:
        be = b.encoding
        b.encoding = BlockEncoding(
            perturb_first_rotation(be.circuit, perturb), be.n, be.m, be.scale, be.hermitian, be.label
        )
    return b


def _tolerance(cfg: dict) -> float:
    return cfg["tolerance"] if "tolerance" in cfg else default_tolerance()


def cmd_build(args) -> int:
    b = _prepare(_config_from_args(args), args.perturb)
    out = Path(b.cfg.get("output_dir", "."))
    write_bundle(b, out)
    print(_dump_json(build_metadata(b)), end="")
    return EXIT_OK


def _verify_one(raw: dict, perturb) -> tuple[int, dict]:
    try:
        b = _prepare(raw, perturb)
        rep = verify_report(b, _tolerance(b.cfg))
    except InfeasibleParametersError as exc:
        return EXIT_INFEASIBLE, {"error": str(exc)}
    except ConfigError as exc:
        return EXIT_CONFIG, {"error": str(exc)}
    if "output_dir" in b.cfg:
        write_bundle(b, Path(b.cfg["output_dir"]))
        (Path(b.cfg["output_dir"]) / "verify.json").write_text(_dump_json(rep), encoding="utf-8")
    return (EXIT_OK if rep["passed"] else EXIT_VERIFY), rep


def cmd_verify(args) -> int:
    if args.sweep:
        try:
            text = Path(args.sweep).read_text(encoding="utf-8")
            configs = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read sweep file: {exc}") from exc
        if not isinstance(configs, list) or not all(isinstance(c, dict) for c in configs):
            raise ConfigError("sweep file must hold a JSON list of config objects")
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda c: _verify_one(c, args.perturb), configs))
        print(_dump_json([rep for _, rep in results]), end="")
        return max((code for code, _ in results), default=EXIT_OK)
    code, rep = _verify_one(_config_from_args(args), args.perturb)
    print(_dump_json(rep), end="")
    return code


def cmd_walk(args) -> int:
    raw = _config_from_args(args)
    raw["family"] = "walk"
    return cmd_verify_raw(raw, args.perturb)


def cmd_verify_raw(raw, perturb) -> int:
    code, rep = _verify_one(raw, perturb)
    print(_dump_json(rep), end="")
    return code


def _parse_coeffs(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.replace(" ", "").split(",") if v)
    except ValueError:
        raise ConfigError(f"bad coefficient list: {text!r}") from None


def cmd_qsp(args) -> int:
    if (args.target is None) == (args.cheb_rescale is None):
        raise ConfigError("give exactly one of --target or --cheb-rescale")
    report = {}
    try:
        if args.cheb_rescale is not None:
            k, s = args.cheb_rescale
            resc = qsp.rescale_chebyshev(int(k), s)
            target = resc.target
            report.update(rescale_coeffs=list(resc.coeffs), norm=resc.norm)
        else:
            target = qsp.TargetPolynomial(_parse_coeffs(args.target))
    except (InvalidTargetError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if args.degree is not None and args.degree != target.degree:
        raise ConfigError(f"--degree {args.degree} does not match target degree {target.degree}")
    tol = args.tolerance if args.tolerance is not None else 1e-10
    out = Path(args.output_dir or ".")
    try:
        phases = qsp.solve_phases(target, tol=tol)
    except PhaseSolverError as exc:
        print(_dump_json({"error": str(exc), "best_residual": exc.best_residual}), end="")
        return EXIT_SOLVER
    report.update(
        degree=target.degree,
        coefficients=list(target.coeffs),
        phases=list(phases.phases),
        residual=qsp.objective(phases, target),
        max_grid_error=qsp.grid_error(phases, target),
    )
    out.mkdir(parents=True, exist_ok=True)
    (out / "phases.txt").write_text(phases.to_text(), encoding="utf-8")
    (out / "report.json").write_text(_dump_json(report), encoding="utf-8")
    print(_dump_json(report), end="")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def _add_config_flags(p: argparse.ArgumentParser, family: bool = True):
    p.add_argument("--config", help="JSON or key=value config file")
    if family:
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--n", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--oc-ordering", dest="oc_ordering", choices=sparse_enc.OC_ORDERINGS)
    p.add_argument("--oa-style", dest="oa_style", choices=sparse_enc.OA_STYLES)
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--perturb", type=float, default=None, metavar="DELTA",
                   help="add DELTA to the first rotation angle")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="blockenc", description="Construct and check block-encoding circuits.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", help="write circuit.qasm, circuit.txt and report.json")
    _add_config_flags(b)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="simulate and compare against the dense reference")
    _add_config_flags(v)
    v.add_argument("--sweep", help="JSON list of configs, verified in parallel")
    v.set_defaults(func=cmd_verify)

    w = sub.add_parser("walk", help="verify (U_P Z_Pi)^k against T_k(P)")
    _add_config_flags(w, family=False)
    w.set_defaults(func=cmd_walk)

    q = sub.add_parser("qsp", help="solve QSP phase factors")
    q.add_argument("--target", help="Chebyshev coefficients c0,c1,...")
    q.add_argument("--cheb-rescale", nargs=2, type=float, metavar=("K", "S"))
    q.add_argument("--degree", type=int)
    q.add_argument("--tolerance", type=float)
    q.add_argument("--output-dir", dest="output_dir")
    q.set_defaults(func=cmd_qsp)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"blockenc: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleParametersError as exc:
        print(f"blockenc: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
