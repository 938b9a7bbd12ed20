"""Physical parameters, unit parsing and derived constants.

All lengths are SI metres internally.  Time never appears: propagation is
parameterised by distance (z = ct), so the speed of light is not a number
anywhere in the package.
"""
from __future__ import annotations

import json
import math
import re
from decimal import Decimal
from dataclasses import dataclass, field, replace
from pathlib import Path


class ConfigError(ValueError):
    """Invalid user-supplied parameters or configuration."""


# decimal exponent of each unit, so "60um" parses to exactly 6e-05
_UNITS = {
    "m": 0,
    "mm": -3,
    "um": -6,
    "µm": -6,
    "μm": -6,
    "nm": -9,
    "cm": -2,
}
_LENGTH_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-zA-Zµμ]*)\s*$")


def parse_length(text) -> float:
    """Parse ``"702nm"``, ``"70 mm"``, ``"1.2e-3"`` (metres) into metres."""
    if isinstance(text, (int, float)):
        return float(text)
    m = _LENGTH_RE.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse length {text!r}")
    value, unit = m.groups()
    unit = unit or "m"
    if unit not in _UNITS:
        raise ConfigError(f"unknown length unit {unit!r} in {text!r}")
    return float(Decimal(value).scaleb(_UNITS[unit]))


def sigma_from_crystal(crystal_length: float, lambda_p: float) -> float:
    """Momentum-spread scale sigma = sqrt(L * lambda_p / (6 pi)) of the SPDC source."""
    if not (crystal_length > 0 and lambda_p > 0):
        raise ConfigError("crystal length and pump wavelength must be positive")
    return math.sqrt(crystal_length * lambda_p / (6.0 * math.pi))


@dataclass(frozen=True)
class SourceParams:
    """Double-Gaussian biphoton source.

    ``omega_cap`` is the spread of the centre-of-mass coordinate and
    ``sigma`` the spread of the relative coordinate; the state is separable
    iff they are equal.
    """

    lam: float
    sigma: float
    omega_cap: float
    lambda_p: float | None = None
    crystal_length: float | None = None

    def __post_init__(self):
        if not (self.lam > 0 and self.sigma > 0 and self.omega_cap > 0):
            raise ConfigError("lambda, sigma and omega must be positive")

    @classmethod
    def from_crystal(cls, lam: float, lambda_p: float, crystal_length: float,
                     omega_over_sigma: float) -> "SourceParams":
        sigma = sigma_from_crystal(crystal_length, lambda_p)
        return cls(lam=lam, sigma=sigma, omega_cap=omega_over_sigma * sigma,
                   lambda_p=lambda_p, crystal_length=crystal_length)

    @property
    def k0(self) -> float:
        return 2.0 * math.pi / self.lam

    @property
    def z0_plus(self) -> float:
        return self.k0 * self.omega_cap ** 2

    @property
    def z0_minus(self) -> float:
        return self.k0 * self.sigma ** 2

    def with_ratio(self, omega_over_sigma: float) -> "SourceParams":
        return replace(self, omega_cap=omega_over_sigma * self.sigma)


def rayleigh_lengths(params: SourceParams) -> tuple[float, float]:
    """(z0+, z0-) = (k0 Omega^2, k0 sigma^2)."""
    return params.z0_plus, params.z0_minus


@dataclass(frozen=True)
class SlitGeometry:
    """Gaussian double slit: slit 1 (upper) sits at +d/2, slit 2 at -d/2."""

    z: float
    z_tau: float
    d: float
    beta1: float
    beta2: float

    def __post_init__(self):
        if self.z < 0 or self.z_tau < 0 or self.d < 0:
            raise ConfigError("distances must be non-negative")
        if not (self.beta1 > 0 and self.beta2 > 0):
            raise ConfigError("slit widths must be positive")

    @property
    def symmetric(self) -> bool:
        return self.beta1 == self.beta2

    @classmethod
    def symmetric_slits(cls, z: float, z_tau: float, d: float, beta: float) -> "SlitGeometry":
        return cls(z=z, z_tau=z_tau, d=d, beta1=beta, beta2=beta)


@dataclass(frozen=True)
class ScaleConstants:
    """Scales that make the covariance matrix dimensionless.

    Logarithmic negativity does not depend on either value.
    """

    hbar: float = 1.0
    length_scale: float = 1e-3
    c_convention: str = field(default="z=ct", compare=False)

    def __post_init__(self):
        if not (self.hbar > 0 and self.length_scale > 0):
            raise ConfigError("hbar and length_scale must be positive")


# Parameter set shared by most figures: 702 nm biphotons from a 7 mm crystal
# pumped at 351.1 nm.
DEFAULT_LAMBDA = 702e-9
DEFAULT_LAMBDA_P = 351.1e-9
DEFAULT_CRYSTAL = 7.0e-3


def default_source(omega_over_sigma: float = 10.0) -> SourceParams:
    return SourceParams.from_crystal(DEFAULT_LAMBDA, DEFAULT_LAMBDA_P, DEFAULT_CRYSTAL, omega_over_sigma)


_CONFIG_KEYS = {"lambda", "lambda_p", "crystal_length", "sigma", "omega_over_sigma",
                "z", "z_tau", "d", "beta1", "beta2"}


def load_config(path_or_mapping) -> tuple[SourceParams, SlitGeometry]:
    """Build parameters from a JSON file (or an already-parsed mapping).

    Missing keys fall back to the defaults below.  ``sigma`` overrides the
    crystal-derived value when present.
    """
    if isinstance(path_or_mapping, (str, Path)):
        try:
            raw = json.loads(Path(path_or_mapping).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path_or_mapping}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path_or_mapping}: {exc}") from exc
    else:
        raw = dict(path_or_mapping)
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    lam = parse_length(raw.get("lambda", "702nm"))
    lambda_p = parse_length(raw.get("lambda_p", "351.1nm"))
    crystal = parse_length(raw.get("crystal_length", "7mm"))
    try:
        ratio = float(raw.get("omega_over_sigma", 10.0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"omega_over_sigma must be a number: {exc}") from exc
    if "sigma" in raw:
        sigma = parse_length(raw["sigma"])
        source = SourceParams(lam=lam, sigma=sigma, omega_cap=ratio * sigma,
                              lambda_p=lambda_p, crystal_length=crystal)
    else:
        source = SourceParams.from_crystal(lam, lambda_p, crystal, ratio)
    geom = SlitGeometry(
        z=parse_length(raw.get("z", "2mm")),
        z_tau=parse_length(raw.get("z_tau", "70mm")),
        d=parse_length(raw.get("d", "200um")),
        beta1=parse_length(raw.get("beta1", "60um")),
        beta2=parse_length(raw.get("beta2", "5um")),
    )
    return source, geom
