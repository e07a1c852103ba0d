"""Runtime configuration, read from the environment (and ``.env``) once per call."""

import os
from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import Any, Dict, Iterator, Optional, Tuple

from dotenv import dotenv_values, load_dotenv

load_dotenv()

ENV_PREFIX = "AIMKIT_"

_overrides: ContextVar[Dict[str, Any]] = ContextVar("aimkit_settings", default={})


@dataclass(frozen=True)
class Settings:
    """Numerical defaults shared by the library and the CLI."""

    prec: int = 256
    eigen_prec: int = 512
    max_prec: int = 4096
    x0: Fraction = Fraction(1, 10000)
    degree_bound: int = 20000
    pole_shift: Fraction = Fraction(1, 1000)
    max_pole_shifts: int = 5
    sample_lo: Fraction = Fraction(1, 10)
    sample_hi: Fraction = Fraction(2)
    sample_points: int = 10
    seed: int = 20240501
    escalation_step: int = 10
    scan_lo: Fraction = Fraction(0)
    scan_hi: Fraction = Fraction(30)
    scan_step: Fraction = Fraction(1, 10)
    scan_iterations: int = 40
    start_iterations: int = 40
    max_iterations: int = 800
    required_agreements: int = 2
    convergence_tol: float = 1e-6

    @property
    def sample_interval(self) -> Tuple[Fraction, Fraction]:
        return self.sample_lo, self.sample_hi

    @property
    def scan_window(self) -> Tuple[Fraction, Fraction]:
        return self.scan_lo, self.scan_hi


def _coerce(name: str, raw: Any) -> Any:
    """Convert a string (env var or config-file value) to the field's type."""
    template = getattr(Settings, name)
    if not isinstance(raw, str):
        return raw
    if isinstance(template, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(template, int):
        return int(raw)
    if isinstance(template, Fraction):
        return Fraction(raw.strip())
    if isinstance(template, float):
        return float(raw)
    return raw


def _from_mapping(values: Dict[str, Any]) -> Dict[str, Any]:
    known = {f.name for f in fields(Settings)}
    out = {}
    for key, raw in values.items():
        if key not in known:
            raise ValueError(f"Unsupported setting: {key}. Use one of {sorted(known)}.")
        out[key] = _coerce(key, raw)
    return out


def _from_environment() -> Dict[str, Any]:
    found = {}
    for f in fields(Settings):
        raw = os.environ.get(ENV_PREFIX + f.name.upper())
        if raw is not None:
            found[f.name] = raw
    return _from_mapping(found)


def get_settings(**overrides: Any) -> Settings:
    """Get settings from the environment, with keyword overrides on top.

    Args:
        **overrides: Field values that win over ``AIMKIT_*`` variables and
            any active ``override_settings`` block.

    Returns:
        Settings instance.
    """
    base = Settings(**{**_from_environment(), **_overrides.get()})
    if not overrides:
        return base
    return replace(base, **_from_mapping(overrides))


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    """Read a plain ``key=value`` config file into coerced setting values.

    Keys that are not settings (e.g. ``lambda0``) are returned untouched so the
    CLI can use them as flag defaults.
    """
    if path is None:
        return {}
    known = {f.name for f in fields(Settings)}
    values = {k: v for k, v in dotenv_values(path).items() if v is not None}
    settings_part = {k: v for k, v in values.items() if k in known}
    extra = {k: v for k, v in values.items() if k not in known}
    return {**extra, **_from_mapping(settings_part)}


@contextmanager
def override_settings(**values: Any) -> Iterator[Settings]:
    """Make ``values`` the defaults seen by ``get_settings`` inside the block."""
    token = _overrides.set({**_overrides.get(), **_from_mapping(values)})
    try:
        yield get_settings()
    finally:
        _overrides.reset(token)
