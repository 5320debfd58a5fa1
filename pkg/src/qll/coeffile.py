"""Coefficient files: Maass-form Fourier coefficients with their spectral
parameter and Atkin-Lehner sign."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import ConfigError
from .exact import format_rational
from .lift import FileSource


@dataclass(frozen=True)
class CoefficientFile:
    r: float
    atkin_lehner: int
    coefficients: tuple  # ((n, float | Fraction), ...)

    def __post_init__(self):
        if self.atkin_lehner not in (1, -1):
            raise ConfigError(f"atkin_lehner must be 1 or -1, got {self.atkin_lehner!r}", "atkin_lehner")
        seen = set()
        for n, _ in self.coefficients:
            if n == 0:
                raise ConfigError("coefficient index 0 is not allowed", "coefficients")
            if n in seen:
                raise ConfigError(f"duplicate coefficient index {n}", "coefficients")
            seen.add(n)

    def to_source(self) -> FileSource:
        return FileSource({n: v for n, v in self.coefficients if n < 0}, self.r, self.atkin_lehner)

    def dumps(self) -> str:
        rows = sorted(self.coefficients, key=lambda nv: (abs(nv[0]), nv[0]))
        body = ",\n".join(f"    [{n}, {_fmt_value(v)}]" for n, v in rows)
        return ("{\n"
                f"  \"r\": {json.dumps(float(self.r))},\n"
                f"  \"atkin_lehner\": {self.atkin_lehner},\n"
                "  \"coefficients\": [\n" + body + ("\n" if body else "") + "  ]\n"
                "}\n")

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.dumps())


def _fmt_value(v) -> str:
    if isinstance(v, Fraction):
        return json.dumps(format_rational(v))
    return json.dumps(float(v))


def parse_coefficient_text(text: str) -> CoefficientFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"coefficient file is not valid JSON: {exc}", "file") from exc
    if not isinstance(data, dict):
        raise ConfigError("coefficient file must hold a JSON object", "file")
    if "r" not in data or data["r"] is None:
        raise ConfigError("coefficient file is missing r", "r")
    r = data["r"]
    if isinstance(r, bool) or not isinstance(r, (int, float)):
        raise ConfigError(f"r must be a number, got {r!r}", "r")
    al = data.get("atkin_lehner")
    if isinstance(al, bool) or al not in (1, -1):
        raise ConfigError(f"atkin_lehner must be 1 or -1, got {al!r}", "atkin_lehner")
    raw = data.get("coefficients")
    if not isinstance(raw, list):
        raise ConfigError("coefficients must be a list of [n, value] pairs", "coefficients")
    coeffs = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[0], int)
                and not isinstance(item[0], bool)):
            raise ConfigError(f"bad coefficient entry {item!r}", "coefficients")
        n, v = item
        if isinstance(v, str):
            try:
                v = Fraction(v)
            except ValueError as exc:
                raise ConfigError(f"bad rational value {v!r} at n={n}", "coefficients") from exc
        elif isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"bad coefficient value {v!r} at n={n}", "coefficients")
        else:
            v = float(v)
        coeffs.append((n, v))
    return CoefficientFile(float(r), al, tuple(coeffs))


def load_coefficient_file(path: str | Path) -> FileSource:
    return read_coefficient_file(path).to_source()


def read_coefficient_file(path: str | Path) -> CoefficientFile:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read coefficient file {path}: {exc}", "file") from exc
    return parse_coefficient_text(text)


def synthetic_file(seed: int = 0, count: int = 10, r: float = 1.0, eps: int = 1) -> CoefficientFile:
    """Seeded synthetic coefficients c(-1), ..., c(-count), all nonzero."""
    rng = random.Random(seed)
    coeffs = []
    for m in range(1, count + 1):
        v = 0.0
        while v == 0.0:
            v = round(rng.uniform(-1.0, 1.0), 6)
        coeffs.append((-m, v))
    return CoefficientFile(float(r), eps, tuple(coeffs))
