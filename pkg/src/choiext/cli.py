"""Command-line front end.

Exit status: 0 on success, 1 when the requested check fails (e.g. no
entanglement detected), 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from . import io, upb, witness
from .identities import DEFAULT_DIAG, identity_residuals
from .linalg import BipartiteDims, eigh, partial_transpose
from .maps import (
    ChoKyeParams,
    MapSpec,
    SingularInput,
    cho_kye_t,
    choi_c1,
    choi_c2,
    clamp_to_operation,
    generalized_choi,
    inner_automorphism,
    operator_factor,
    outer_automorphism,
    positivity_seesaw,
    transpose_map,
    unitary_u,
)

COMMANDS = ("state", "ppt-check", "detect", "sweep", "verify-identities", "positivity", "unextendability")
MAP_FAMILIES = ("choi1", "choi2", "generalized", "transpose")
STATE_SOURCES = ("tiles", "pyramid", "file")


class ConfigError(ValueError):
    def __init__(self, name: str, message: str):
        super().__init__(f"{name}: {message}")
        self.field = name


@dataclass
class RunConfig:
    command: str
    map_family: str = "choi1"
    abc: tuple[float, float, float] | None = None
    t: float | None = None
    automorphism: str | None = None
    theta: float | None = None
    diag: tuple[complex, ...] | None = None
    factor_file: str | None = None
    clamp: bool = False
    state_source: str = "tiles"
    state_file: str | None = None
    dims: tuple[int, int] | None = None
    sweep: witness.SweepConfig = field(default_factory=witness.SweepConfig)
    tol: float = witness.NEGATIVITY_TOL
    seed: int = 0
    restarts: int = 50
    iters: int = 200
    threshold: float = 1e-6
    workers: int | None = None
    output_path: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}")
        if self.map_family not in MAP_FAMILIES:
            raise ConfigError("--map", f"unknown family {self.map_family!r}")
        if self.map_family == "generalized":
            if (self.abc is None) == (self.t is None):
                raise ConfigError("--abc/--t", "generalized family needs exactly one of --abc or --t")
        elif self.abc is not None or self.t is not None:
            raise ConfigError("--abc/--t", f"parameters only apply to the generalized family, not {self.map_family}")
        factors = [x is not None for x in (self.theta, self.diag, self.factor_file)]
        if self.automorphism is None and any(factors):
            raise ConfigError("--automorphism", "a factor was given without --automorphism inner|outer")
        if self.automorphism is not None:
            if self.automorphism not in ("inner", "outer"):
                raise ConfigError("--automorphism", f"must be inner or outer, got {self.automorphism!r}")
            if sum(factors) != 1:
                raise ConfigError("--automorphism", "needs exactly one of --theta, --diag, --factor-file")
        if self.diag is not None and any(d == 0 for d in self.diag):
            raise ConfigError("--diag", "diagonal entries must all be nonzero")
        if self.state_source not in STATE_SOURCES:
            raise ConfigError("--state", f"unknown source {self.state_source!r}")
        if self.state_source == "file" and not self.state_file:
            raise ConfigError("--state-file", "required with --state file")
        if self.restarts < 1 or self.iters < 1:
            raise ConfigError("--restarts/--iters", "must be positive")
        return self


def _parse_triple(text: str) -> tuple[float, float, float]:
    vals = [float(x) for x in text.replace(",", " ").split()]
    if len(vals) != 3:
        raise ValueError("expected three numbers a,b,c")
    return tuple(vals)


def build_state(cfg: RunConfig) -> upb.DensityOperator:
    if cfg.state_source == "tiles":
        return upb.upb_complement_state(upb.tiles())
    if cfg.state_source == "pyramid":
        return upb.upb_complement_state(upb.pyramid())
    try:
        m = io.read_matrix(cfg.state_file)
    except (OSError, ValueError) as exc:
        raise ConfigError("--state-file", str(exc)) from None
    if cfg.dims is not None:
        dims = BipartiteDims(*cfg.dims)
    else:
        d = math.isqrt(m.shape[0])
        if d * d != m.shape[0]:
            raise ConfigError("--dims", f"cannot infer a square split of dimension {m.shape[0]}")
        dims = BipartiteDims(d, d)
    try:
        return upb.DensityOperator(m, dims.validate(), cfg.state_file)
    except ValueError as exc:
        raise ConfigError("--state-file", str(exc)) from None


def build_map(cfg: RunConfig, dim: int = 3) -> MapSpec:
    if cfg.map_family == "choi1":
        phi = choi_c1()
    elif cfg.map_family == "choi2":
        phi = choi_c2()
    elif cfg.map_family == "transpose":
        phi = transpose_map(dim)
    else:
        try:
            params = ChoKyeParams(*cfg.abc) if cfg.abc is not None else cho_kye_t(cfg.t)
        except ValueError as exc:
            raise ConfigError("--abc/--t", str(exc)) from None
        phi = generalized_choi(params)
    if cfg.automorphism is None:
        return phi
    try:
        if cfg.theta is not None:
            if phi.dim != 3:
                raise ConfigError("--theta", "the rotation factor is 3x3")
            factor = unitary_u(cfg.theta)
        else:
            m = np.diag(cfg.diag) if cfg.diag is not None else io.read_matrix(cfg.factor_file)
            factor = clamp_to_operation(m) if cfg.clamp else operator_factor(m)
    except (OSError, SingularInput) as exc:
        raise ConfigError("--diag" if cfg.diag is not None else "--factor-file", str(exc)) from None
    if factor.dim != phi.dim:
        raise ConfigError("--factor-file", f"factor is {factor.dim}x{factor.dim}, map acts on {phi.dim}x{phi.dim}")
    if cfg.automorphism == "inner":
        return inner_automorphism(phi, factor)
    return outer_automorphism(factor, phi)


def _cmd_state(cfg: RunConfig, out: TextIO) -> int:
    rho = build_state(cfg)
    w = eigh(rho.matrix)[0]
    rank = int(np.sum(w > 1e-10))
    print(f"state: {rho.label}", file=out)
    print(f"dims: {rho.dims.dA}x{rho.dims.dB}", file=out)
    print(f"trace: {np.trace(rho.matrix).real:.17g}", file=out)
    print(f"rank: {rank}", file=out)
    print(f"min_eigenvalue: {w[0]:.17g}", file=out)
    if cfg.output_path:
        io.write_matrix(rho.matrix, cfg.output_path)
        print(f"wrote {cfg.output_path}", file=out)
    return 0


def _cmd_ppt(cfg: RunConfig, out: TextIO) -> int:
    rho = build_state(cfg)
    lam = eigh(partial_transpose(rho.matrix, rho.dims))[0][0]
    ok = lam >= -cfg.tol
    print(f"partial transpose min eigenvalue: {lam:.17g}", file=out)
    print(f"PPT: {'yes' if ok else 'no'}", file=out)
    return 0 if ok else 1


def _cmd_detect(cfg: RunConfig, out: TextIO) -> int:
    rho = build_state(cfg)
    phi = build_map(cfg, rho.dims.dB)
    try:
        detected, lam = witness.detect(phi, rho, cfg.tol)
    except ValueError as exc:
        raise ConfigError("--map", str(exc)) from None
    print(f"map: {phi.label}", file=out)
    print(f"state: {rho.label}", file=out)
    print(f"lambda_min = {lam:.17g}", file=out)
    if detected:
        print("lambda_min < 0, entangled", file=out)
        return 0
    if lam > 0:
        print("lambda_min > 0, inconclusive", file=out)
    else:
        print(f"lambda_min within {cfg.tol:g} of 0, inconclusive", file=out)
    return 1


def _cmd_sweep(cfg: RunConfig, out: TextIO) -> int:
    rho = build_state(cfg)
    phi = build_map(cfg, rho.dims.dB)
    try:
        curve = witness.sweep(phi, rho, cfg.sweep, workers=cfg.workers)
    except ValueError as exc:
        raise ConfigError("--map", str(exc)) from None
    report = witness.detection_intervals(curve, cfg.sweep.negativity_tol)
    if cfg.output_path:
        io.write_curve_csv(curve, cfg.output_path)
        summary = out
        print(f"wrote {len(curve)} records to {cfg.output_path}", file=summary)
    else:
        out.write(io.format_curve_csv(curve))
        summary = sys.stderr
    print(f"map: {phi.label}", file=summary)
    print(f"state: {rho.label}", file=summary)
    print(f"global_min: {report.global_min:.17g} at theta = {report.global_argmin:.17g}", file=summary)
    print(f"detection intervals: {len(report.intervals)}", file=summary)
    for lo, hi in report.intervals:
        print(f"  [{lo:.12g}, {hi:.12g}]", file=summary)
    return 0 if report.detected else 1


def _cmd_identities(cfg: RunConfig, out: TextIO) -> int:
    diag = cfg.diag if cfg.diag is not None else DEFAULT_DIAG
    res = identity_residuals(diag=diag)
    worst = max(res.values())
    for name, r in res.items():
        print(f"{r:.3e}  {name}", file=out)
    print(f"max residual: {worst:.3e}", file=out)
    return 0 if worst <= 1e-12 else 1


def _cmd_positivity(cfg: RunConfig, out: TextIO) -> int:
    phi = build_map(cfg)
    val, (x, y) = positivity_seesaw(phi, cfg.restarts, cfg.iters, cfg.seed)
    print(f"map: {phi.label}", file=out)
    print(f"min biquadratic form: {val:.17g}", file=out)
    print(f"positive: {'yes' if val >= -cfg.tol else 'no'}", file=out)
    return 0 if val >= -cfg.tol else 1


def _cmd_unextendability(cfg: RunConfig, out: TextIO) -> int:
    if cfg.state_source == "file":
        raise ConfigError("--state", "unextendability needs a product basis (tiles or pyramid)")
    basis = upb.tiles() if cfg.state_source == "tiles" else upb.pyramid()
    val = upb.unextendability_seesaw(basis, cfg.restarts, cfg.seed)
    print(f"basis: {basis.label}", file=out)
    print(f"min overlap: {val:.17g}", file=out)
    ok = val > cfg.threshold
    print(f"unextendable (heuristic): {'yes' if ok else 'no'}", file=out)
    if cfg.output_path:
        io.write_matrix(basis.vectors, cfg.output_path)
    return 0 if ok else 1


_DISPATCH = {
    "state": _cmd_state,
    "ppt-check": _cmd_ppt,
    "detect": _cmd_detect,
    "sweep": _cmd_sweep,
    "verify-identities": _cmd_identities,
    "positivity": _cmd_positivity,
    "unextendability": _cmd_unextendability,
}


def run(cfg: RunConfig, out: TextIO | None = None) -> int:
    out = out or sys.stdout
    try:
        cfg.validate()
        return _DISPATCH[cfg.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("arguments", message)


def _typed(name: str, conv):
    def parse(text):
        try:
            return conv(text)
        except ValueError as exc:
            raise ConfigError(name, f"{text!r}: {exc}") from None
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="choiext", description="Choi-map extensions and UPB entanglement detection.")
    p.add_argument("command", choices=COMMANDS)
    g = p.add_argument_group("map")
    g.add_argument("--map", dest="map_family", default="choi1", choices=MAP_FAMILIES)
    g.add_argument("--abc", type=_typed("--abc", _parse_triple), help="generalized family parameters a,b,c")
    g.add_argument("--t", type=_typed("--t", float), help="extremal generalized family parameter t >= 0")
    g.add_argument("--automorphism", choices=("inner", "outer"))
    g.add_argument("--theta", type=_typed("--theta", io.parse_angle), help="rotation angle, e.g. 0.3 or 3pi/2")
    g.add_argument("--diag", type=_typed("--diag", lambda s: tuple(complex(x) for x in s.split(","))),
                   help="comma-separated diagonal factor entries")
    g.add_argument("--factor-file", help="explicit factor in matrix-file format")
    g.add_argument("--clamp", action="store_true", help="rescale the factor so A A^dagger <= I")
    s = p.add_argument_group("state")
    s.add_argument("--state", dest="state_source", default="tiles", choices=STATE_SOURCES)
    s.add_argument("--state-file")
    s.add_argument("--dims", type=_typed("--dims", lambda x: tuple(int(v) for v in x.split(","))),
                   help="dA,dB for --state file")
    w = p.add_argument_group("sweep")
    w.add_argument("--theta-start", type=_typed("--theta-start", io.parse_angle), default=0.0)
    w.add_argument("--theta-end", type=_typed("--theta-end", io.parse_angle), default=2 * math.pi)
    w.add_argument("--samples", type=_typed("--samples", int), default=721)
    w.add_argument("--workers", type=_typed("--workers", int))
    o = p.add_argument_group("other")
    o.add_argument("--tol", type=_typed("--tol", float), default=witness.NEGATIVITY_TOL)
    o.add_argument("--seed", type=_typed("--seed", int), default=0)
    o.add_argument("--restarts", type=_typed("--restarts", int), default=50)
    o.add_argument("--iters", type=_typed("--iters", int), default=200)
    o.add_argument("--threshold", type=_typed("--threshold", float), default=1e-6,
                   help="minimum overlap counted as unextendable")
    o.add_argument("--output", "-o", dest="output_path")
    return p


def config_from_args(argv: list[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    try:
        sweep = witness.SweepConfig(ns.theta_start, ns.theta_end, ns.samples, ns.tol)
    except ValueError as exc:
        raise ConfigError("--theta-start/--theta-end/--samples/--tol", str(exc)) from None
    kw = vars(ns)
    for key in ("theta_start", "theta_end", "samples"):
        kw.pop(key)
    return RunConfig(sweep=sweep, **kw)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = config_from_args(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
