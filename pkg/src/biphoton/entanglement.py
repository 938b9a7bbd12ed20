"""Covariance matrices, symplectic spectra, logarithmic negativity and
position cross-correlations of the diffracted biphoton.

Phase-space ordering is (x1, p1, x2, p2).  Matrices hold centred,
symmetrised second moments, scaled to be dimensionless by
``ScaleConstants``; a minimum-uncertainty state has symplectic eigenvalues
1/2.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .params import ScaleConstants, SourceParams
from .propagation import ComplexQuadraticForm, PathLabel, SlitWavepacket

log = logging.getLogger(__name__)

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])
SYMPLECTIC_FORM = np.block([[_J, np.zeros((2, 2))], [np.zeros((2, 2)), _J]])
_PT = np.diag([1.0, 1.0, 1.0, -1.0])


class PhysicalityError(ArithmeticError):
    """A computed covariance matrix violates the uncertainty principle."""


class UndefinedCorrelation(ArithmeticError):
    pass


@dataclass(frozen=True)
class CovarianceMatrix:
    entries: np.ndarray
    first_moments: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float).reshape(4, 4)
        object.__setattr__(self, "entries", 0.5 * (m + m.T))
        object.__setattr__(self, "first_moments", np.asarray(self.first_moments, dtype=float))

    @property
    def G(self) -> np.ndarray:
        return self.entries[:2, :2]

    @property
    def H(self) -> np.ndarray:
        return self.entries[2:, 2:]

    @property
    def C(self) -> np.ndarray:
        return self.entries[:2, 2:]

    def partial_transpose(self) -> "CovarianceMatrix":
        """Flip the sign of p2."""
        fm = self.first_moments * np.array([1, 1, 1, -1])
        return CovarianceMatrix(_PT @ self.entries @ _PT, fm)

    def standard_form(self) -> tuple[float, float, float, float]:
        """Local-symplectic invariants (g, h, c, c') of the block-diagonal normal form."""
        det_g, det_h = np.linalg.det(self.G), np.linalg.det(self.H)
        det_c, det_m = np.linalg.det(self.C), np.linalg.det(self.entries)
        g, h = math.sqrt(det_g), math.sqrt(det_h)
        # c^2 and c'^2 solve t^2 - S t + det_c^2 = 0 with det M = (gh - c^2)(gh - c'^2)
        total = (g * g * h * h + det_c ** 2 - det_m) / (g * h)
        disc = max(total * total - 4 * det_c ** 2, 0.0)
        c2 = (total + math.sqrt(disc)) / 2
        c = math.sqrt(max(c2, 0.0))
        c_prime = det_c / c if c > 0 else 0.0
        return g, h, c, c_prime

    @property
    def g(self) -> float:
        return self.standard_form()[0]

    @property
    def h(self) -> float:
        return self.standard_form()[1]

    @property
    def c_plus(self) -> float:
        return self.standard_form()[2]

    @property
    def c_minus(self) -> float:
        return self.standard_form()[3]


@dataclass(frozen=True)
class SymplecticSpectrum:
    nu_min: float
    nu_max: float
    of_partial_transpose: bool
    block_route: tuple[float, float] = (math.nan, math.nan)
    quartic_route: tuple[float, float] = (math.nan, math.nan)

    @property
    def route_divergence(self) -> float:
        """Largest gap between the eigenvalue and block-determinant routes."""
        return max(abs(self.nu_min - self.block_route[0]), abs(self.nu_max - self.block_route[1]))


@dataclass(frozen=True)
class CorrelationReport:
    """Position cross-correlation of one path.

    ``rho`` is the Pearson coefficient from centred moments.  ``rho_moment``
    divides raw (uncentred) moments, i.e. keeps the slit offset in both
    numerator and denominator; ``rho_linear`` is the same quotient written
    with first powers of the spreads and separation.
    """

    rho: float
    path: PathLabel | str
    rho_moment: float = math.nan
    rho_linear: float = math.nan


# --------------------------------------------------------------------------
# covariance matrices


def _scale_vector(scales: ScaleConstants) -> np.ndarray:
    L, hb = scales.length_scale, scales.hbar
    return np.array([1 / L, L / hb, 1 / L, L / hb])


def _check_physical(m: CovarianceMatrix, tol: float = 1e-9) -> CovarianceMatrix:
    nu = symplectic_spectrum(m, partial_transpose=False, cross_check=False)
    if nu.nu_min < 0.5 - tol:
        raise PhysicalityError(f"symplectic eigenvalue {nu.nu_min!r} below 1/2")
    return m


def _photon_coefficients(form: ComplexQuadraticForm, local_gauge: bool):
    t = np.array([[0.5, 0.5], [0.5, -0.5]])
    a = t.T @ form.q @ t
    b = t.T @ form.l
    if local_gauge:
        # drop each photon's own quadratic and linear phase; a product of
        # single-photon phases is a local unitary and leaves the spectrum alone
        a = a - 1j * np.diag(np.diag(a.imag))
        b = b.real.astype(complex)
    return a, b


def covariance_from_form(form: ComplexQuadraticForm, scales: ScaleConstants = ScaleConstants(),
                         check: bool = True, local_gauge: bool = False) -> CovarianceMatrix:
    """Exact moments of a Gaussian wavefunction given as a quadratic form.

    Writing psi = exp(-X.A X - b.X) in photon coordinates X = (x1, x2),
    positions have covariance (Re A)^-1 / 4, momenta
    hbar^2 (Re A + Im A (Re A)^-1 Im A), and the symmetrised x-p block is
    -(hbar/2) (Re A)^-1 Im A.

    With ``local_gauge`` the single-photon phase factors are removed first.
    The result is a different matrix with the same symplectic spectra; far
    from the slits it avoids the cancellation between the chirp and the
    momentum spread.
    """
    hb = scales.hbar
    a, b = _photon_coefficients(form, local_gauge)
    ar, ai = a.real, a.imag
    ar_inv = np.linalg.inv(ar)
    cov_x = ar_inv / 4
    cov_p = hb * hb * (ar + ai @ ar_inv @ ai)
    cov_xp = -0.5 * hb * ar_inv @ ai
    mean_x = -0.5 * ar_inv @ b.real
    mean_p = hb * (-2 * ai @ mean_x - b.imag)

    m = np.empty((4, 4))
    for i in range(2):
        for j in range(2):
            m[2 * i, 2 * j] = cov_x[i, j]
            m[2 * i + 1, 2 * j + 1] = cov_p[i, j]
            m[2 * i, 2 * j + 1] = cov_xp[i, j]
            m[2 * j + 1, 2 * i] = cov_xp[i, j]
    sv = _scale_vector(scales)
    fm = np.array([mean_x[0], mean_p[0], mean_x[1], mean_p[1]]) * sv
    out = CovarianceMatrix(m * np.outer(sv, sv), fm)
    if check:
        _check_physical(out if local_gauge else covariance_from_form(form, scales, False, True))
    return out


def raw_moments(wp: SlitWavepacket, hbar: float = 1.0) -> dict[str, float]:
    """Uncentred second moments and first moments from the closed-form parameters.

    Same-slit paths carry their offset in r, cross-slit paths in q; both
    cases follow from psi being a product of one Gaussian per sector.
    """
    if wp.coupled:
        raise ValueError("coupled wavepackets have no closed-form moments; use covariance_from_form")
    b2, bt2, k0 = wp.b ** 2, wp.b_tilde ** 2, wp.k0
    irp, irm = wp.inv_r_plus, wp.inv_r_minus
    D, dl = wp.separation, wp.delta
    spread_p = 1 / b2 + k0 ** 2 * b2 * irp ** 2
    spread_m = 1 / bt2 + k0 ** 2 * bt2 * irm ** 2
    if wp.path.same_slit:
        tilt = dl + k0 * D * irp
        sign = 1.0
        xp_offset = k0 * D * D * irp + D * dl
    else:
        tilt = dl + k0 * D * irm
        sign = -1.0
        xp_offset = k0 * D * D * irm + D * dl
    mom = {
        "x1x1": (b2 + bt2 + D * D) / 4,
        "x1x2": (b2 - bt2 + sign * D * D) / 4,
        "p1p1": hbar ** 2 / 4 * (spread_p + spread_m + tilt ** 2),
        "p1p2": hbar ** 2 / 4 * (spread_p - spread_m + sign * tilt ** 2),
        "x1p1": hbar / 4 * (k0 * (b2 * irp + bt2 * irm) + xp_offset),
        "x1p2": hbar / 4 * (k0 * (b2 * irp - bt2 * irm) + sign * xp_offset),
        "x1": D / 2,
        "x2": sign * D / 2,
        "p1": hbar * tilt / 2,
        "p2": sign * hbar * tilt / 2,
    }
    return mom


def covariance_from_wavepacket(wp: SlitWavepacket, scales: ScaleConstants = ScaleConstants(),
                               check: bool = True) -> CovarianceMatrix:
    """Covariance matrix from the closed-form moment expressions.

    Coupled wavepackets fall back to the exact form.
    """
    if wp.coupled:
        return covariance_from_form(wp.form, scales, check)
    mo = raw_moments(wp, scales.hbar)
    x1, p1, x2, p2 = mo["x1"], mo["p1"], mo["x2"], mo["p2"]
    m = np.empty((4, 4))
    m[0, 0] = m[2, 2] = mo["x1x1"] - x1 * x1
    m[1, 1] = m[3, 3] = mo["p1p1"] - p1 * p1
    m[0, 2] = m[2, 0] = mo["x1x2"] - x1 * x2
    m[1, 3] = m[3, 1] = mo["p1p2"] - p1 * p2
    m[0, 1] = m[1, 0] = mo["x1p1"] - x1 * p1
    m[2, 3] = m[3, 2] = mo["x1p1"] - x1 * p1
    m[0, 3] = m[3, 0] = mo["x1p2"] - x1 * p2
    m[2, 1] = m[1, 2] = mo["x1p2"] - x1 * p2
    sv = _scale_vector(scales)
    out = CovarianceMatrix(m * np.outer(sv, sv), np.array([x1, p1, x2, p2]) * sv)
    if check:
        # far from the slits the raw moments lose digits to the chirp; judge
        # physicality on the de-chirped matrix, which has the same spectrum
        _check_physical(out if wp.form is None
                        else covariance_from_form(wp.form, scales, False, True))
    return out


# --------------------------------------------------------------------------
# spectra and negativity


def symplectic_eigenvalues(entries: np.ndarray) -> np.ndarray:
    """Sorted symplectic eigenvalues (|eig(i Omega M)|, one per mode).

    Each mode is first rescaled x -> x/s, p -> p*s with s^2 = Mxx/Mpp; the
    rescaling is a local symplectic map so the spectrum is unchanged, but it
    keeps far-field matrices (huge position spread, tiny momentum spread)
    well conditioned.
    """
    entries = np.asarray(entries, dtype=float)
    s = np.ones(4)
    for mode in range(2):
        xx, pp = entries[2 * mode, 2 * mode], entries[2 * mode + 1, 2 * mode + 1]
        if xx > 0 and pp > 0:
            t = (pp / xx) ** 0.25
            s[2 * mode], s[2 * mode + 1] = t, 1 / t
    entries = entries * np.outer(s, s)
    ev = np.linalg.eigvals(1j * SYMPLECTIC_FORM @ entries)
    return np.sort(np.abs(ev))[::2]


def symplectic_spectrum(m: CovarianceMatrix, partial_transpose: bool = True,
                        cross_check: bool = True, tol: float = 1e-9) -> SymplecticSpectrum:
    mat = m.partial_transpose() if partial_transpose else m
    nu = symplectic_eigenvalues(mat.entries)
    if not cross_check:
        return SymplecticSpectrum(float(nu[0]), float(nu[1]), partial_transpose)

    det_g, det_h = np.linalg.det(m.G), np.linalg.det(m.H)
    det_c, det_m = np.linalg.det(m.C), np.linalg.det(m.entries)
    sgn = -1.0 if partial_transpose else 1.0
    delta = det_g + det_h + sgn * 2 * det_c
    disc = delta * delta - 4 * det_m
    scale = max(delta * delta, 1e-300)
    if disc < -tol * scale:
        raise PhysicalityError(f"negative discriminant {disc!r} in the symplectic invariants")
    root = math.sqrt(max(disc, 0.0))
    block = (math.sqrt(max((delta - root) / 2, 0.0)), math.sqrt((delta + root) / 2))

    # the same quadratic in nu^2 with the linear coefficient built from the
    # normal-form invariants g^2 + c^2 - 2 c c'; this coincides with the block
    # route only when g^2 + h^2 = g^2 + c^2.
    try:
        g, h, c, cp = m.standard_form()
        coef = g * g + c * c + sgn * 2 * c * cp
        qd = coef * coef - 4 * det_m
        quartic = tuple(math.sqrt(max((coef + s * math.sqrt(qd)) / 2, 0.0)) for s in (-1, 1)) \
            if qd >= 0 else (math.nan, math.nan)
    except ValueError:
        quartic = (math.nan, math.nan)
    spec = SymplecticSpectrum(float(nu[0]), float(nu[1]), partial_transpose, block, quartic)
    if spec.route_divergence > 1e-6 * max(1.0, spec.nu_max):
        log.warning("symplectic routes disagree: eig=%s block=%s", (spec.nu_min, spec.nu_max), block)
    return spec


# values below this are round-off around nu_min = 1/2 and are reported as 0
NEGATIVITY_FLOOR = 1e-12


def log_negativity(m: CovarianceMatrix) -> float:
    """max(0, -ln 2 nu_min) of the partially transposed matrix."""
    nu = symplectic_spectrum(m, partial_transpose=True, cross_check=False).nu_min
    value = -math.log(2 * nu)
    return value if value > NEGATIVITY_FLOOR else 0.0


def wavepacket_negativity(wp: SlitWavepacket, scales: ScaleConstants = ScaleConstants()) -> float:
    """E_N of a wavepacket through the exact form when attached."""
    if wp.form is not None:
        return log_negativity(covariance_from_form(wp.form, scales, local_gauge=True))
    return log_negativity(covariance_from_wavepacket(wp, scales))


@dataclass(frozen=True)
class ClosedFormNegativity:
    value: float
    numeric: float
    applicable: bool
    discrepancy: float
    raw: complex = complex("nan")


def _closed_form_raw(wp: SlitWavepacket) -> complex:
    b, bt = wp.b, wp.b_tilde
    rp, rm = wp.r_plus_slit, wp.r_minus_slit
    D, dl, k0 = wp.separation, wp.delta, wp.k0
    b2, bt4 = b * b, bt ** 4
    a1 = ((rm * dl - D * k0) * rp + D * rm * k0) ** 2 * bt4 + D * D * rp * rp * rm * rm
    a2 = rp * rp * rm * rm + k0 ** 2 * (rp - rm) ** 2 * bt4
    a3 = 2 * bt * bt * rp * rp * rm * rm
    a4_over_dl2 = a3 / 2
    a4 = a4_over_dl2 * dl * dl
    a5 = -2 * k0 ** 2 * (rp - rm) ** 2 * bt4 - 2 * rp * rp * rm * rm
    den6 = rp * dl + k0 * D
    a6 = ((-2 * dl * dl * rm * rm - 4 * k0 * D * rp * dl - 2 * D * D * k0 * k0)
          * (rm - k0 * rp * D / den6) ** 2 * bt4 - 2 * D * D * rp * rp * rm * rm)

    def big_a(s1, s2):
        num = s1 * a1 + a3
        den = s2 * a2 + a4
        return (b2 + num / (2 * den)) ** 2 * den - num * num / (4 * den) + a4_over_dl2 * (bt * bt + D * D)

    A1, A2 = big_a(1, 1), big_a(-1, -1)
    A3 = 4 * a5 * (b2 + a6 / (2 * a5)) ** 2 - (a6 * a6 / a5 + 8 * a4_over_dl2)
    inner = cmath.sqrt(cmath.sqrt(-A1 * A2) + A3)
    return cmath.log(math.sqrt(2) * 1j * b * bt * rp * rm / inner)


def log_negativity_closed_form(wp: SlitWavepacket, scales: ScaleConstants = ScaleConstants(),
                               tol: float = 1e-6) -> ClosedFormNegativity:
    """Literal evaluation of the closed-form expression, with a diagnostic.

    Undefined symbols in the expression are read as
    R_uu -> R+ and Rs -> R-, and (B~ + D^2) as (B~^2 + D^2).  The result
    is compared against :func:`log_negativity`; disagreements are logged.
    """
    numeric = wavepacket_negativity(wp, scales)
    if not wp.path.same_slit or wp.coupled:
        raise ValueError("closed form applies to same-slit, equal-width wavepackets")
    try:
        with np.errstate(all="ignore"):
            raw = _closed_form_raw(wp)
    except (ZeroDivisionError, ValueError, OverflowError):
        raw = complex("nan")
    applicable = bool(np.isfinite(raw.real) and np.isfinite(raw.imag)
                      and abs(raw.imag) < 1e-9 * max(1.0, abs(raw.real)))
    value = max(0.0, raw.real) if applicable else math.nan
    disc = abs(value - numeric) if applicable else math.nan
    if not applicable:
        log.info("closed-form E_N inapplicable (raw=%s); numeric=%.6g", raw, numeric)
    elif disc > tol:
        log.warning("closed-form E_N %.6g disagrees with numeric %.6g", value, numeric)
    return ClosedFormNegativity(value, numeric, applicable, disc, raw)


# --------------------------------------------------------------------------
# correlations


def cross_correlation(wp: SlitWavepacket) -> CorrelationReport:
    if wp.coupled:
        m = covariance_from_form(wp.form, check=False)
        var1, var2, cov = m.entries[0, 0], m.entries[2, 2], m.entries[0, 2]
        if var1 <= 0 or var2 <= 0:
            raise UndefinedCorrelation("zero position variance")
        mx1, mx2 = m.first_moments[0], m.first_moments[2]
        raw = (cov + mx1 * mx2) / math.sqrt((var1 + mx1 ** 2) * (var2 + mx2 ** 2))
        return CorrelationReport(float(cov / math.sqrt(var1 * var2)), wp.path, float(raw))
    try:
        mo = raw_moments(wp)
    except ZeroDivisionError as exc:
        raise UndefinedCorrelation("degenerate wavepacket spreads") from exc
    var1 = mo["x1x1"] - mo["x1"] ** 2
    var2 = mo["x1x1"] - mo["x2"] ** 2
    if var1 <= 0 or var2 <= 0:
        raise UndefinedCorrelation("zero position variance")
    rho = (mo["x1x2"] - mo["x1"] * mo["x2"]) / math.sqrt(var1 * var2)
    rho_moment = mo["x1x2"] / mo["x1x1"]
    b, bt, D = wp.b, wp.b_tilde, wp.separation
    sign = 1.0 if wp.path.same_slit else -1.0
    rho_linear = (b - bt + sign * D) / (b + bt + D)
    return CorrelationReport(float(rho), wp.path, float(rho_moment), float(rho_linear))


def free_cross_correlation(params: SourceParams, z_total: float) -> float:
    if z_total < 0:
        raise ValueError("z_total must be non-negative")
    o2, s2 = params.omega_cap ** 2, params.sigma ** 2
    u = (z_total / (params.k0 * params.sigma * params.omega_cap)) ** 2
    return (o2 - s2) / (o2 + s2) * (1 - u) / (1 + u)
