"""Command-line front end: ``run``, ``sweep`` and ``validate``.

Configuration is a single flat JSON object.  Recognized keys::

    omega_over_g       number | [numbers] | {"start", "stop", "step"} | {"condition_k": [ints]}
    gtilde_over_g      number in [0, 1)            (default 0.1)
    gamma0             number >= 0                 (default 1e-3)
    alpha              number >= 0                 (default 1e-3)
    method             "expm" | "rk4"              (default "expm")
    rk4_step_fraction  number in (0, 0.01]         (default 1e-4)
    output_path        string                      (default none)
    seed               integer                     (default 0)
    coupling_mode      "spectral" | "literal"      (default "spectral")

Unknown keys are rejected.  A missing ``omega_over_g`` means the grid
1, 1.5, ..., 20.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import closedforms, model, protocol
from .dynamics import EvolutionMethod, InvariantViolation, Method, write_trajectory_csv
from .model import CouplingMode, ProtocolParams

DEFAULT_GRID = {"start": 1.0, "stop": 20.0, "step": 0.5}
VALIDATE_DEFAULT_OMEGA = 5.0

_KEYS = (
    "omega_over_g",
    "gtilde_over_g",
    "gamma0",
    "alpha",
    "method",
    "rk4_step_fraction",
    "output_path",
    "seed",
    "coupling_mode",
)


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.key = key
        self.line = line
        self.column = column


@dataclass(frozen=True)
class RunConfig:
    omega_over_g: float | tuple[float, ...]
    gtilde_over_g: float = 0.1
    gamma0: float = 1e-3
    alpha: float = 1e-3
    method: str = "expm"
    rk4_step_fraction: float = 1e-4
    output_path: str | None = None
    seed: int = 0
    coupling_mode: str = "spectral"

    @property
    def grid(self) -> list[float]:
        if isinstance(self.omega_over_g, tuple):
            return list(self.omega_over_g)
        return [self.omega_over_g]

    @property
    def is_scalar(self) -> bool:
        return not isinstance(self.omega_over_g, tuple)

    def params(self, omega: float) -> ProtocolParams:
        return ProtocolParams(omega=omega, gtilde=self.gtilde_over_g, gamma0=self.gamma0, alpha=self.alpha)

    def evolution_method(self) -> EvolutionMethod:
        return EvolutionMethod(Method(self.method), self.rk4_step_fraction)


def _locate(source: str, key: str) -> tuple[int | None, int | None]:
    m = re.search(r'"%s"\s*:' % re.escape(key), source)
    if not m:
        return None, None
    line = source.count("\n", 0, m.start()) + 1
    col = m.start() - (source.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _grid(value, gtilde: float, fail) -> float | tuple[float, ...]:
    if _is_number(value):
        if value <= 0:
            fail("must be positive")
        return float(value)
    if isinstance(value, list):
        if not value or not all(_is_number(v) for v in value):
            fail("list must be a non-empty list of numbers")
        pts = [float(v) for v in value]
    elif isinstance(value, dict) and set(value) == {"condition_k"}:
        ks = value["condition_k"]
        if not isinstance(ks, list) or not ks or not all(isinstance(k, int) and not isinstance(k, bool) and k >= 1 for k in ks):
            fail("condition_k must be a non-empty list of positive integers")
        pts = [model.ghz_condition_omega(k, gtilde) for k in ks]
    elif isinstance(value, dict) and set(value) == {"start", "stop", "step"}:
        start, stop, step = value["start"], value["stop"], value["step"]
        if not all(_is_number(v) for v in (start, stop, step)) or step <= 0 or stop < start:
            fail("grid needs numbers with step > 0 and stop >= start")
        n = math.floor((stop - start) / step + 1e-9)
        pts = [round(start + i * step, 12) for i in range(n + 1)]
    else:
        fail("expected a number, a list, {start, stop, step} or {condition_k}")
    if any(p <= 0 for p in pts):
        fail("grid points must be positive")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        fail("grid must be strictly increasing")
    return tuple(pts)


def parse_config(source: str) -> RunConfig:
    """Parse and validate a JSON config document, applying defaults."""
    if not source.strip():
        source = "{}"
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config: {exc.msg}", None, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a single JSON object", None, 1, 1)

    def fail(key):
        def _raise(msg):
            line, col = _locate(source, key)
            raise ConfigError(f"{key}: {msg}", key, line, col)

        return _raise

    for key in doc:
        if key not in _KEYS:
            fail(key)("unknown key")

    gtilde = doc.get("gtilde_over_g", 0.1)
    if not _is_number(gtilde) or not 0 <= gtilde < 1:
        fail("gtilde_over_g")("must be a number in [0, 1)")
    values = {"gtilde_over_g": float(gtilde)}
    for key in ("gamma0", "alpha"):
        v = doc.get(key, 1e-3)
        if not _is_number(v) or v < 0:
            fail(key)("must be a number >= 0")
        values[key] = float(v)
    method = doc.get("method", "expm")
    if method not in ("expm", "rk4"):
        fail("method")('must be "expm" or "rk4"')
    frac = doc.get("rk4_step_fraction", 1e-4)
    if not _is_number(frac) or not 0 < frac <= 1e-2:
        fail("rk4_step_fraction")("must be a number in (0, 0.01]")
    out = doc.get("output_path")
    if out is not None and not isinstance(out, str):
        fail("output_path")("must be a string")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        fail("seed")("must be an integer")
    mode = doc.get("coupling_mode", "spectral")
    if mode not in ("spectral", "literal"):
        fail("coupling_mode")('must be "spectral" or "literal"')
    omega = _grid(doc.get("omega_over_g", DEFAULT_GRID), values["gtilde_over_g"], fail("omega_over_g"))
    return RunConfig(
        omega_over_g=omega,
        method=method,
        rk4_step_fraction=float(frac),
        output_path=out,
        seed=seed,
        coupling_mode=mode,
        **values,
    )


def load_config(args) -> RunConfig:
    source = Path(args.config).read_text() if args.config else "{}"
    cfg = parse_config(source)
    if args.output:
        cfg = replace(cfg, output_path=args.output)
    if args.method:
        cfg = replace(cfg, method=args.method)
    return cfg


def write_density_csv(path, rho: np.ndarray) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("row", "col", "real", "imag"))
        for i in range(rho.shape[0]):
            for j in range(rho.shape[1]):
                w.writerow((i, j, f"{rho[i, j].real:.16g}", f"{rho[i, j].imag:.16g}"))


def cmd_run(cfg: RunConfig, out=None, trajectory_path=None) -> int:
    out = out or sys.stdout
    if not cfg.is_scalar:
        print("run: omega_over_g must be a single number", file=sys.stderr)
        return 2
    p = cfg.params(cfg.omega_over_g)
    try:
        run = protocol.run_protocol(p, cfg.evolution_method(), CouplingMode(cfg.coupling_mode))
    except InvariantViolation as exc:
        print(f"run: {exc}", file=sys.stderr)
        return 3
    m = run.metrics
    t1, tint, t3 = (s.duration for s in run.stages)
    phase_opt = "undefined" if m.phase_optimal is None else f"{m.phase_optimal:.10f}"
    lines = [
        ("omega_over_g", f"{p.omega:.12g}"),
        ("gtilde_over_g", f"{p.gtilde:.12g}"),
        ("gamma0", f"{p.gamma0:.12g}"),
        ("alpha", f"{p.alpha:.12g}"),
        ("method", cfg.method),
        ("coupling_mode", cfg.coupling_mode),
        ("F", f"{m.f_protocol:.10f}"),
        ("F_GHZ_nominal", f"{m.f_ghz:.10f}"),
        ("F_GHZ_optimal", f"{m.f_ghz_optimal:.10f}"),
        ("phi_nominal", f"{m.phase_nominal:.10f}"),
        ("phi_optimal", phase_opt),
        ("leakage", f"{m.leakage:.10f}"),
        ("alpha_angle", f"{model.alpha_angle(p):.10f}"),
        ("theta_angle", f"{model.theta_angle(p):.10f}"),
        ("t1", f"{t1:.10f}"),
        ("t_int", f"{tint:.10f}"),
        ("t3", f"{t3:.10f}"),
        ("t_tot", f"{t1 + tint + t3:.10f}"),
        ("trace_err", f"{m.trace_err:.3e}"),
        ("pos_err", f"{m.pos_err:.3e}"),
    ]
    for k, v in lines:
        print(f"{k} = {v}", file=out)
    if cfg.output_path:
        write_density_csv(cfg.output_path, run.final.data)
    if trajectory_path:
        write_trajectory_csv(trajectory_path, run.coupling_trajectory, model.symmetric_basis())
    return 0


def cmd_sweep(cfg: RunConfig, out=None, workers: int | None = None) -> int:
    out = out or sys.stdout
    grid = cfg.grid
    records = protocol.sweep(grid, cfg.params(grid[0]), cfg.evolution_method(), CouplingMode(cfg.coupling_mode), workers)
    progress = out if cfg.output_path else sys.stderr
    for i, r in enumerate(records, 1):
        status = f"FAILED ({r.error})" if r.error else f"F={r.f_protocol:.6f} F_GHZ_opt={r.f_ghz_optimal:.6f}"
        print(f"[{i}/{len(records)}] omega/g={r.omega_over_g:.6g} {status}", file=progress)
    if cfg.output_path:
        with open(cfg.output_path, "w", newline="") as fh:
            protocol.write_sweep_csv(fh, records)
    else:
        protocol.write_sweep_csv(out, records)
    return 1 if all(r.error for r in records) else 0


VALIDATE_HEADER = ("stage", "bath", "channel", "bohr", "distance", "status")


def cmd_validate(cfg: RunConfig, out=None) -> int:
    out = out or sys.stdout
    omega = cfg.omega_over_g if cfg.is_scalar else VALIDATE_DEFAULT_OMEGA
    p = cfg.params(omega)
    rows, unitarity = closedforms.validation_report(p)
    literal, _ = closedforms.validation_report(p, corrected=False)
    lines = []
    for r in rows:
        lines.append((r.stage, r.bath, r.channel, f"{r.bohr:.12g}", f"{r.distance:.6e}", r.status))
    for r in literal:
        if r.status == "MISMATCH":
            lines.append((r.stage, r.bath, r.channel + "_uncorrected", f"{r.bohr:.12g}", f"{r.distance:.6e}", "sign-corrected"))
    lines.append(("T", "", "unitarity", "", f"{unitarity:.6e}", "ok" if unitarity <= closedforms.MATCH_TOL else "MISMATCH"))
    text = _csv_text([VALIDATE_HEADER, *lines])
    out.write(text)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    ok = closedforms.report_passes(rows) and unitarity <= closedforms.MATCH_TOL
    return 0 if ok else 1


def _csv_text(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to a JSON config file")
    common.add_argument("--output", help="output path (overrides output_path)")
    common.add_argument("--method", choices=("expm", "rk4"), help="override the evolution method")

    parser = argparse.ArgumentParser(prog="ghzbath", description="GHZ generation with three bath-coupled Josephson qubits")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", parents=[common], help="simulate one parameter point")
    run.add_argument("--trajectory", help="write the entangling-stage trajectory CSV here")
    sw = sub.add_parser("sweep", parents=[common], help="fidelity sweep over omega/g")
    sw.add_argument("--workers", type=int, default=None, help="worker processes (default: serial)")
    sub.add_parser("validate", parents=[common], help="compare generic and closed-form jump operators")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
    except (ConfigError, OSError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 2
    if args.command == "run":
        return cmd_run(cfg, trajectory_path=args.trajectory)
    if args.command == "sweep":
        return cmd_sweep(cfg, workers=args.workers)
    return cmd_validate(cfg)


if __name__ == "__main__":
    sys.exit(main())
