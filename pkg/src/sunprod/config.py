"""Session configuration: the Poisson data, the star selector and truncation bounds."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .diffop import OperatorSeries, series_from_exchange
from .lie import JacobiError, LieAlgebra, PoissonStructure, abelian
from .poly import to_rational
from .star import GuttStar, MoyalStar, StarProduct, apply_equivalence


class ConfigError(ValueError):
    """Bad or inconsistent configuration; maps to exit status 2."""


@dataclass
class SessionConfig:
    dim: int
    poisson: PoissonStructure
    algebra: LieAlgebra | None
    order: int
    degree: int
    star: str = ""
    fmt: str = "human"
    seed: int = 0

    @property
    def default_star(self) -> str:
        return "gutt" if self.algebra is not None else "moyal"


def _rational(value, where: str):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ConfigError(f"{where}: rationals must be strings like \"p/q\" or integers")
    try:
        return to_rational(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def parse_config(data: dict) -> SessionConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    try:
        dim = int(data["dim"])
        spec = data["poisson"]
        kind = spec["type"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"config is missing a required field: {exc}") from exc
    if dim < 1:
        raise ConfigError("dim must be positive")
    algebra = None
    try:
        if kind == "constant":
            matrix = spec["matrix"]
            if len(matrix) != dim or any(len(row) != dim for row in matrix):
                raise ConfigError(f"matrix must be {dim}x{dim}")
            rows = [[_rational(v, f"matrix[{i}][{j}]") for j, v in enumerate(row)]
                    for i, row in enumerate(matrix)]
            poisson = PoissonStructure(dim, rows)
        elif kind == "lie":
            entries = []
            for e in spec.get("brackets", []):
                entries.append({"i": int(e["i"]), "j": int(e["j"]), "k": int(e["k"]),
                                "c": _rational(e.get("c", "1"), "bracket constant")})
            algebra = LieAlgebra.from_entries(dim, entries) if entries else abelian(dim)
            poisson = algebra.poisson()
        else:
            raise ConfigError(f"unknown poisson type {kind!r}")
    except (JacobiError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    order = int(data.get("order", 3))
    degree = int(data.get("degree", 4))
    return SessionConfig(dim, poisson, algebra, order, degree)


def load_config(source: str) -> SessionConfig:
    try:
        text = Path(source).read_text(encoding="utf-8") if source != "-" else _stdin()
        data = json.loads(text)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(data)


def _stdin() -> str:
    import sys

    return sys.stdin.read()


def _base_star(cfg: SessionConfig, name: str) -> StarProduct:
    if name == "moyal":
        if not cfg.poisson.is_constant():
            raise ConfigError("the moyal star needs a constant Poisson matrix")
        return MoyalStar(cfg.poisson)
    if name == "gutt":
        if cfg.algebra is None:
            raise ConfigError("the gutt star needs Lie algebra structure constants")
        return GuttStar(cfg.algebra)
    raise ConfigError(f"unknown star selector {name!r}")


def load_twist(path: str, dim: int) -> tuple[str | None, OperatorSeries]:
    """Twist file: an exchange list, or {"base": name, "operators": list}."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read twist file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"twist file is not valid JSON: {exc}") from exc
    base = None
    if isinstance(data, dict):
        base = data.get("base")
        data = data.get("operators", [])
    try:
        series = series_from_exchange(data, dim)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad twist operator: {exc}") from exc
    if not series.is_normalized():
        raise ConfigError("twist operators must vanish on constants")
    return base, series


def build_star(cfg: SessionConfig, selector: str | None = None) -> StarProduct:
    selector = selector or cfg.star or cfg.default_star
    if selector.startswith("twist:"):
        base_name, series = load_twist(selector[len("twist:"):], cfg.dim)
        base = _base_star(cfg, base_name or cfg.default_star)
        return apply_equivalence(series, base)
    return _base_star(cfg, selector)
