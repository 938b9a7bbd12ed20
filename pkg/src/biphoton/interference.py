"""Screen intensities, fringe visibility and Gouy-phase-difference extraction.

The four path amplitudes are superposed at the screen.  For unequal slit
widths the same-slit amplitudes acquire different Gouy phases, and at
points where their remaining phase difference is an even multiple of pi
the relative intensity and visibility encode |zeta1 - zeta2| directly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .params import SlitGeometry, SourceParams
from .propagation import PathLabel, SlitWavepacket, slit_wavepacket

log = logging.getLogger(__name__)

ARCCOS_SLACK = 1e-9
PHASE_TOL = 1e-9
# linear map between Gouy difference and negativity fitted over 36-50 um
LINEAR_OFFSET = 0.48
LINEAR_SLOPE = 0.16
DEFAULT_TARGET_R = -0.12e-3


class ConstraintViolated(ArithmeticError):
    """(Ir - 1)/nu lies outside [-1, 1]: the point is not on an n*pi fringe."""


class RootSearchError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ScreenPoint:
    r: float
    q: float = 0.0

    @property
    def x1(self) -> float:
        return self.r + self.q

    @property
    def x2(self) -> float:
        return self.r - self.q


@dataclass(frozen=True)
class ScreenPattern:
    grid: np.ndarray
    q: float
    i4: np.ndarray
    i2: np.ndarray
    i2_prime: np.ndarray
    ir: np.ndarray
    vis: np.ndarray
    excluded: np.ndarray = field(repr=False)
    normalization: str = "unit"

    def normalized(self, name: str) -> np.ndarray:
        """One intensity series scaled to unit maximum."""
        values = getattr(self, name)
        peak = values.max()
        return values / peak if peak > 0 else values


@dataclass(frozen=True)
class GouyMeasurement:
    r_star: float
    beta1: float
    n: int
    gouy_diff: float
    e_n_linear: float | None
    ir: float = math.nan
    vis: float = math.nan
    phase_residual: float = math.nan
    gouy_diff_exact: float = math.nan


# --------------------------------------------------------------------------
# amplitudes and patterns


def amplitude(wp: SlitWavepacket, r, q=0.0, normalization: str = "unit"):
    """Complex amplitude of one path at screen coordinates (r, q).

    ``"unit"`` normalises every path to unit probability (prefactor
    1/sqrt(pi B B~)); ``"exact"`` keeps the slit transmission, so paths
    that rarely occur carry proportionally smaller weight.
    """
    if isinstance(r, ScreenPoint):
        r, q = r.r, r.q
    if normalization == "unit":
        form = wp.as_form()
    elif normalization == "exact":
        if wp.form is None:
            raise ValueError("exact normalisation needs the wavepacket's quadratic form")
        form = wp.form
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    return form(r, q)


def path_wavepackets(params: SourceParams, geom: SlitGeometry) -> dict[PathLabel, SlitWavepacket]:
    return {p: slit_wavepacket(params, geom, p) for p in PathLabel}


def screen_pattern(params: SourceParams, geom: SlitGeometry, grid, q: float = 0.0,
                   normalization: str = "exact") -> ScreenPattern:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    steps = np.diff(grid)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("grid must be strictly monotone")
    wps = path_wavepackets(params, geom)
    amp = {p: amplitude(wp, grid, q, normalization) for p, wp in wps.items()}
    same = amp[PathLabel.UU] + amp[PathLabel.DD]
    cross = amp[PathLabel.UD] + amp[PathLabel.DU]
    i4 = np.abs(same + cross) ** 2
    i2 = np.abs(same) ** 2
    i2p = np.abs(cross) ** 2
    # ratios are formed after an exact power-of-two rescaling by the larger
    # same-slit modulus so that they survive far into the tails
    big = np.maximum(np.abs(amp[PathLabel.UU]), np.abs(amp[PathLabel.DD]))
    excluded = ~(big > 0)
    exp2 = np.frexp(np.where(excluded, 1.0, big))[1]

    def rescale(a):
        return np.ldexp(a.real, -exp2) + 1j * np.ldexp(a.imag, -exp2)

    su, sd = rescale(amp[PathLabel.UU]), rescale(amp[PathLabel.DD])
    u, dn = np.abs(su), np.abs(sd)
    f = np.where(excluded, 1.0, u * u + dn * dn)
    ir = np.where(excluded, 0.0, np.abs(su + sd) ** 2 / f)
    vis = np.where(excluded, 0.0, np.minimum(2 * u * dn / f, 1.0))
    if excluded.any():
        log.info("%d screen samples have vanishing same-slit intensity", int(excluded.sum()))
    return ScreenPattern(grid, q, i4, i2, i2p, ir, vis, excluded, normalization)


def visibility_closed(wp_uu: SlitWavepacket, r):
    """Fringe visibility sech(2 D r / B^2) of equal-width slits at q = 0."""
    x = np.abs(2 * wp_uu.separation * np.asarray(r, dtype=float) / wp_uu.b ** 2)
    e = np.exp(-x)
    return 2 * e / (1 + e * e)


def fringe_visibility(intensity: np.ndarray) -> np.ndarray:
    """(Imax - Imin)/(Imax + Imin) for each adjacent max/min pair of a sampled pattern.

    Returns an array of shape (k, 2) holding (index of the maximum, visibility).
    """
    i = np.asarray(intensity, dtype=float)
    inner = i[1:-1]
    maxima = np.where((inner > i[:-2]) & (inner >= i[2:]))[0] + 1
    minima = np.where((inner < i[:-2]) & (inner <= i[2:]))[0] + 1
    out = []
    for m in maxima:
        neighbours = minima[np.abs(minima - m) == np.abs(minima - m).min()] if minima.size else []
        for n in neighbours[:1]:
            out.append((m, (i[m] - i[n]) / (i[m] + i[n])))
    return np.array(out).reshape(-1, 2)


# --------------------------------------------------------------------------
# phase constraint and Gouy extraction


def _path_phase(wp: SlitWavepacket, r, pairing_inv_r: float):
    r = np.asarray(r, dtype=float)
    return wp.k0 * pairing_inv_r * r * r + wp.delta * r + wp.theta


def phase_difference(params: SourceParams, geom: SlitGeometry, r, pairing: str = "consistent",
                     wavepackets: tuple[SlitWavepacket, SlitWavepacket] | None = None):
    """phi_uu - phi_dd at q = 0, without the Gouy terms.

    ``pairing="consistent"`` uses each path's own centre-of-mass curvature;
    ``"mixed"`` pairs the upper path's R+ with the lower path's R-.  Only the former makes the extracted
    Gouy difference exact.
    """
    uu, dd = wavepackets or (slit_wavepacket(params, geom, PathLabel.UU),
                             slit_wavepacket(params, geom, PathLabel.DD))
    if pairing == "consistent":
        inv_dd = dd.inv_r_plus
    elif pairing == "mixed":
        inv_dd = dd.inv_r_minus
    else:
        raise ValueError(f"unknown pairing {pairing!r}")
    return _path_phase(uu, r, uu.inv_r_plus) - _path_phase(dd, r, inv_dd)


def gouy_difference_extract(ir: float, vis: float, slack: float = ARCCOS_SLACK) -> float:
    """|zeta1 - zeta2| = arccos((Ir - 1)/nu) on an even-n fringe."""
    if not vis > 0:
        raise ConstraintViolated("visibility must be positive")
    arg = (ir - 1.0) / vis
    if abs(arg) > 1.0 + slack:
        raise ConstraintViolated(f"(Ir - 1)/nu = {arg!r} outside [-1, 1]")
    return math.acos(min(1.0, max(-1.0, arg)))


def linear_negativity(gouy_diff: float) -> float | None:
    """(|zeta1 - zeta2| - 0.48)/0.16, or None where that would be negative."""
    value = (gouy_diff - LINEAR_OFFSET) / LINEAR_SLOPE
    return value if value >= 0 else None


def constraint_roots(params: SourceParams, geom: SlitGeometry, bracket=(-1e-3, 1e-3),
                     samples: int = 4001, n_values=None, pairing: str = "consistent",
                     both_signs: bool = False) -> list[tuple[float, int]]:
    """All (r, n) with phi_uu - phi_dd = n pi for even n != 0 inside ``bracket``."""
    wps = (slit_wavepacket(params, geom, PathLabel.UU), slit_wavepacket(params, geom, PathLabel.DD))

    def phi(r):
        return float(phase_difference(params, geom, r, pairing, wps))

    lo, hi = bracket
    grid = np.linspace(lo, hi, samples)
    values = phase_difference(params, geom, grid, pairing, wps)
    if n_values is None:
        top = int(math.floor(np.nanmax(np.abs(values)) / math.pi)) + 1
        n_values = [n for n in range(2, top + 1, 2)]
        if both_signs:
            n_values += [-n for n in n_values]
    roots = []
    for n in n_values:
        g = values - n * math.pi
        idx = np.where(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]
        for i in idx:
            if g[i] == 0:
                r = grid[i]
            elif g[i + 1] == 0:
                continue
            else:
                r = brentq(lambda x: phi(x) - n * math.pi, grid[i], grid[i + 1],
                           xtol=1e-18, rtol=4 * np.finfo(float).eps, maxiter=200)
            roots.append((float(r), int(n)))
    return roots


def find_measurement_point(params: SourceParams, geom: SlitGeometry, n: int | None = None,
                           bracket=(-1e-3, 1e-3), target: float = DEFAULT_TARGET_R,
                           pairing: str = "consistent", normalization: str = "exact",
                           both_signs: bool = False) -> GouyMeasurement:
    """Locate an n*pi point of the same-slit phase difference and read off the Gouy difference.

    Without ``n`` every even n (positive, or both signs with ``both_signs``)
    is scanned and the root closest to ``target`` wins.
    """
    if n is not None and (n % 2 or n == 0):
        raise ValueError("n must be a non-zero even integer")
    roots = constraint_roots(params, geom, bracket, n_values=None if n is None else [n],
                             pairing=pairing, both_signs=both_signs)
    if not roots:
        grid = np.linspace(*bracket, 401)
        span = phase_difference(params, geom, grid, pairing)
        raise RootSearchError(f"no even-n root in bracket; phase spans "
                              f"[{span.min():.6g}, {span.max():.6g}] rad")
    r_star, n_star = min(roots, key=lambda rn: (abs(rn[0] - target), abs(rn[1])))

    uu = slit_wavepacket(params, geom, PathLabel.UU)
    dd = slit_wavepacket(params, geom, PathLabel.DD)
    residual = float(phase_difference(params, geom, r_star, pairing, (uu, dd))) - n_star * math.pi
    if abs(residual) > PHASE_TOL:
        log.warning("phase residual %.3g rad at r* = %.9g m", residual, r_star)
    a_u = complex(amplitude(uu, r_star, 0.0, normalization))
    a_d = complex(amplitude(dd, r_star, 0.0, normalization))
    f = abs(a_u) ** 2 + abs(a_d) ** 2
    ir = abs(a_u + a_d) ** 2 / f
    vis = 2 * abs(a_u) * abs(a_d) / f
    gouy = gouy_difference_extract(ir, vis)
    exact = abs(uu.zeta_slit - dd.zeta_slit)
    return GouyMeasurement(r_star=r_star, beta1=geom.beta1, n=n_star, gouy_diff=gouy,
                           e_n_linear=linear_negativity(gouy), ir=ir, vis=vis,
                           phase_residual=residual, gouy_diff_exact=exact)
