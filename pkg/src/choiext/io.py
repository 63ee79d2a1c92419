"""Text formats: sweep-curve CSV, complex matrix files, and angle literals."""

from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .witness import SweepCurve

__all__ = [
    "format_curve_csv",
    "parse_angle",
    "parse_curve_csv",
    "read_curve_csv",
    "read_matrix",
    "write_curve_csv",
    "write_matrix",
]

CSV_HEADER = "theta,lambda_min"

_ANGLE = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<coef>\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d*)?))?\s*$"
)


def parse_angle(text: str) -> float:
    """Radians from a float literal or a multiple of pi such as ``3pi/2`` or ``-pi/4``."""
    m = _ANGLE.match(text.lower())
    if m:
        coef = float(m["coef"]) if m["coef"] else 1.0
        den = float(m["den"]) if m["den"] else 1.0
        val = coef * math.pi / den
        return -val if m["sign"] == "-" else val
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"not an angle: {text!r}") from None


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def format_curve_csv(curve: SweepCurve) -> str:
    lines = [CSV_HEADER]
    lines += [f"{_fmt(t)},{_fmt(l)}" for t, l in zip(curve.thetas, curve.lambda_min)]
    return "\n".join(lines) + "\n"


def write_curve_csv(curve: SweepCurve, path: str | Path) -> None:
    Path(path).write_text(format_curve_csv(curve), newline="\n")


def parse_curve_csv(text: str) -> SweepCurve:
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"expected header {CSV_HEADER!r}")
    rows = [line.split(",") for line in lines[1:] if line.strip()]
    th = [float(r[0]) for r in rows]
    lam = [float(r[1]) for r in rows]
    return SweepCurve(np.array(th), np.array(lam))


def read_curve_csv(path: str | Path) -> SweepCurve:
    return parse_curve_csv(Path(path).read_text())


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def write_matrix(m: np.ndarray, path: str | Path) -> None:
    """``rows cols`` header, then one whitespace-separated row of ``re+imj`` literals per line."""
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines += [" ".join(_fmt_complex(z) for z in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_matrix(path: str | Path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    try:
        rows, cols = (int(tok) for tok in lines[0].split())
    except ValueError:
        raise ValueError(f"{path}: first line must be 'rows cols'") from None
    body = lines[1:]
    if len(body) != rows:
        raise ValueError(f"{path}: expected {rows} rows, found {len(body)}")
    out = np.empty((rows, cols), dtype=complex)
    for i, line in enumerate(body):
        toks = line.split()
        if len(toks) != cols:
            raise ValueError(f"{path}: row {i} has {len(toks)} entries, expected {cols}")
        out[i] = [complex(tok) for tok in toks]
    return out
