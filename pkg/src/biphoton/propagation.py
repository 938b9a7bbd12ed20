"""Biphoton wavepackets in free flight and through a Gaussian double slit.

Coordinates are the centre-of-mass ``r = (x1 + x2)/2`` and relative
``q = (x1 - x2)/2`` transverse positions.  Wavefunctions are normalised in
the photon coordinates, i.e. with the measure ``dx1 dx2 = 2 dr dq``.

Two routes are provided and cross-checked in the tests:

* closed forms for the decoupled (per-sector) Gaussians that appear when
  both photons meet windows of equal width, and
* an exact complex-Gaussian integrator (:class:`ComplexQuadraticForm`) that
  handles any pair of windows, including the r-q coupling of unequal slits.

Phase convention: the free kernel is ``exp(+i k0 (y - y')^2 / L)`` and every
wavefunction is written ``|psi| exp(i[k0 r^2/R + Delta r + theta + zeta])``.
The Gouy phase ``zeta`` is therefore negative and decreases with distance.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .params import SlitGeometry, SourceParams


class DegenerateConfiguration(ArithmeticError):
    """A Gaussian integral that should converge does not (unphysical inputs)."""


# --------------------------------------------------------------------------
# free propagation


@dataclass(frozen=True)
class FreeState:
    """Wavepacket parameters after free flight over ``z``."""

    z: float
    w: float
    w_tilde: float
    inv_r_plus: float
    inv_r_minus: float
    zeta_free: float

    @property
    def r_plus(self) -> float:
        return math.inf if self.inv_r_plus == 0 else 1.0 / self.inv_r_plus

    @property
    def r_minus(self) -> float:
        return math.inf if self.inv_r_minus == 0 else 1.0 / self.inv_r_minus


def _inv_curvature(z: float, z0: float) -> float:
    # 1/r(z) with r = z [1 + (z0/z)^2]; finite (zero) at the waist
    return z / (z * z + z0 * z0)


def free_gouy(params: SourceParams, z):
    """Free-flight Gouy phase, continuous in z, tending to -pi/2 far away."""
    z = np.asarray(z, dtype=float)
    val = -0.5 * (np.arctan(z / params.z0_plus) + np.arctan(z / params.z0_minus))
    return float(val) if val.ndim == 0 else val


def free_gouy_single_arctan(params: SourceParams, z: float) -> float:
    """The same phase written as one arctan; wraps where z^2 = z0+ z0-."""
    zp, zm = params.z0_plus, params.z0_minus
    return -0.5 * math.atan(z * (zp + zm) / (zp * zm - z * z))


def free_state(params: SourceParams, z: float) -> FreeState:
    if z < 0:
        raise ValueError("z must be non-negative")
    zp, zm = params.z0_plus, params.z0_minus
    w = params.omega_cap * math.sqrt(1.0 + (z / zp) ** 2)
    wt = params.sigma * math.sqrt(1.0 + (z / zm) ** 2)
    return FreeState(z=z, w=w, w_tilde=wt,
                     inv_r_plus=_inv_curvature(z, zp), inv_r_minus=_inv_curvature(z, zm),
                     zeta_free=free_gouy(params, z))


# --------------------------------------------------------------------------
# paths and closed forms


class PathLabel(enum.Enum):
    """Which slit each photon crosses (photon 1 first)."""

    UU = "uu"
    DD = "dd"
    UD = "ud"
    DU = "du"

    @property
    def same_slit(self) -> bool:
        return self in (PathLabel.UU, PathLabel.DD)

    def slits(self) -> tuple[int, int]:
        """Slit index (1 upper, 2 lower) crossed by photon 1 and photon 2."""
        return {PathLabel.UU: (1, 1), PathLabel.DD: (2, 2),
                PathLabel.UD: (1, 2), PathLabel.DU: (2, 1)}[self]


@dataclass(frozen=True)
class SlitWavepacket:
    """Closed-form description of one path's wavefunction at the screen.

    ``separation`` and ``delta`` live in the r sector for same-slit paths
    and in the q sector for cross-slit paths.  ``form`` holds the exact
    quadratic form when available; for coupled (unequal-width cross-slit)
    paths the scalar fields are only the diagonal part of that form and
    ``coupled`` is set.
    """

    path: PathLabel
    b: float
    b_tilde: float
    inv_r_plus: float
    inv_r_minus: float
    separation: float
    delta: float
    theta: float
    zeta_slit: float
    beta_used: tuple[float, float]
    k0: float
    coupled: bool = False
    form: "ComplexQuadraticForm | None" = field(default=None, compare=False, repr=False)

    @property
    def r_plus_slit(self) -> float:
        return math.inf if self.inv_r_plus == 0 else 1.0 / self.inv_r_plus

    @property
    def r_minus_slit(self) -> float:
        return math.inf if self.inv_r_minus == 0 else 1.0 / self.inv_r_minus

    def as_form(self) -> "ComplexQuadraticForm":
        """Unit-normalised quadratic form equivalent to the scalar fields."""
        if self.coupled:
            return self.form.normalized()
        b2, bt2, k0 = self.b ** 2, self.b_tilde ** 2, self.k0
        q = np.array([[1 / b2 - 1j * k0 * self.inv_r_plus, 0],
                      [0, 1 / bt2 - 1j * k0 * self.inv_r_minus]], dtype=complex)
        if self.path.same_slit:
            l = np.array([-(self.separation / b2 + 1j * self.delta), 0], dtype=complex)
            s = self.separation ** 2 / (4 * b2) - 1j * self.theta
        else:
            l = np.array([0, -(self.separation / bt2 + 1j * self.delta)], dtype=complex)
            s = self.separation ** 2 / (4 * bt2) - 1j * self.theta
        log_norm = -0.5 * math.log(math.pi * self.b * self.b_tilde) + 1j * self.zeta_slit
        return ComplexQuadraticForm(q, l, complex(s), complex(log_norm))


def _sector(params: SourceParams, sector: str, z: float, z_tau: float, inv_beta2: float,
            offset: float):
    """Closed-form constants for one transverse sector behind a Gaussian window.

    ``offset`` is the window centre in that sector's coordinate.  Returns
    (B, 1/R, D, Delta, theta, arg P) with D = 2 * screen centre.
    """
    k0 = params.k0
    if sector == "+":
        width, z0 = params.omega_cap, params.z0_plus
    else:
        width, z0 = params.sigma, params.z0_minus
    w2 = width ** 2 * (1 + (z / z0) ** 2)
    rho = _inv_curvature(z, z0)
    alpha = inv_beta2 + 1 / w2
    # g = z_tau * k0 (1/z_tau + 1/r) stays finite at z_tau = 0
    g = k0 * (1 + z_tau * rho)
    den = (z_tau * alpha) ** 2 + g ** 2
    b2 = den / (k0 ** 2 * alpha)
    inv_r = (z_tau * alpha ** 2 + g * k0 * rho) / den
    # D = d (1 + z_tau/r) / (1 + beta^2/w^2), written to stay finite as beta -> inf
    sep = 2 * offset * (1 + z_tau * rho) * w2 * inv_beta2 / (1 + w2 * inv_beta2)
    delta = -2 * offset * z_tau * k0 * inv_beta2 * alpha / den
    theta = offset ** 2 * inv_beta2 ** 2 * z_tau * g / den
    p_re = 1 - z * z_tau * width ** 2 * inv_beta2 / z0 ** 2
    p_im = (z + z_tau * (1 + width ** 2 * inv_beta2)) / z0
    return math.sqrt(b2), inv_r, sep, delta, theta, math.atan2(p_im, p_re)


def gouy_fg(params: SourceParams, z: float, z_tau: float, beta: float) -> tuple[float, float]:
    """The ratios f (minus sector) and g (plus sector) whose arctans build the slit Gouy phase."""
    out = []
    for width, z0 in ((params.sigma, params.z0_minus), (params.omega_cap, params.z0_plus)):
        num = z + z_tau * (1 + width ** 2 / beta ** 2)
        den = z0 * (1 - z * z_tau * width ** 2 / (z0 ** 2 * beta ** 2))
        out.append(num / den)
    return out[0], out[1]


def slit_gouy(params: SourceParams, z: float, z_tau: float, beta: float) -> float:
    """Gouy phase behind a slit of width ``beta``, continuous in all arguments."""
    inv_b2 = 0.0 if math.isinf(beta) else 1 / beta ** 2
    return -0.5 * (_sector(params, "+", z, z_tau, inv_b2, 0.0)[5]
                   + _sector(params, "-", z, z_tau, inv_b2, 0.0)[5])


def slit_gouy_single_arctan(params: SourceParams, z: float, z_tau: float, beta: float) -> float:
    """Single-arctan form of :func:`slit_gouy`; agrees modulo pi/2."""
    f, g = gouy_fg(params, z, z_tau, beta)
    return -0.5 * math.atan((f + g) / (1 - f * g))


def closed_form_wavepacket(params: SourceParams, geom: SlitGeometry,
                           path: PathLabel) -> SlitWavepacket:
    """Closed-form wavepacket for paths whose two windows share one width."""
    s1, s2 = path.slits()
    beta_a = geom.beta1 if s1 == 1 else geom.beta2
    beta_b = geom.beta1 if s2 == 1 else geom.beta2
    if beta_a != beta_b:
        raise ValueError(f"path {path.name} couples r and q for unequal slits; use the integrator")
    inv_b2 = 0.0 if math.isinf(beta_a) else 1 / beta_a ** 2
    half = geom.d / 2
    c1 = half if s1 == 1 else -half
    c2 = half if s2 == 1 else -half
    # window centres in (r, q): photon centres c1, c2 map to r = (c1+c2)/2, q = (c1-c2)/2
    b, irp, sep_r, dl_r, th_r, arg_p = _sector(params, "+", geom.z, geom.z_tau, inv_b2, (c1 + c2) / 2)
    bt, irm, sep_q, dl_q, th_q, arg_m = _sector(params, "-", geom.z, geom.z_tau, inv_b2, (c1 - c2) / 2)
    if path.same_slit:
        sep, delta = sep_r, dl_r
    else:
        sep, delta = sep_q, dl_q
    return SlitWavepacket(path=path, b=b, b_tilde=bt, inv_r_plus=irp, inv_r_minus=irm,
                          separation=sep, delta=delta, theta=th_r + th_q,
                          zeta_slit=-0.5 * (arg_p + arg_m), beta_used=(beta_a, beta_b),
                          k0=params.k0)


# --------------------------------------------------------------------------
# exact Gaussian integrator


@dataclass(frozen=True)
class ComplexQuadraticForm:
    """``exp(log_norm - [x.Q x + l.x + s])`` over x = (r, q).

    ``log_norm`` carries the Gaussian-integral prefactors; its imaginary
    part is the accumulated Gouy phase and is kept continuous by summing
    per-step phases instead of re-wrapping.
    """

    q: np.ndarray
    l: np.ndarray
    s: complex = 0j
    log_norm: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "q", np.asarray(self.q, dtype=complex).reshape(2, 2))
        object.__setattr__(self, "l", np.asarray(self.l, dtype=complex).reshape(2))

    @property
    def normalizable(self) -> bool:
        qr = self.q.real
        return bool(qr[0, 0] > 0 and np.linalg.det(qr) > 0)

    @property
    def coupling(self) -> complex:
        """Coefficient of the r*q cross term (2 Q_rq)."""
        return complex(2 * self.q[0, 1])

    def __call__(self, r, q):
        r = np.asarray(r, dtype=float)
        q = np.asarray(q, dtype=float)
        Q, l = self.q, self.l
        expo = Q[0, 0] * r * r + 2 * Q[0, 1] * r * q + Q[1, 1] * q * q + l[0] * r + l[1] * q + self.s
        return np.exp(self.log_norm - expo)

    def times(self, other: "ComplexQuadraticForm") -> "ComplexQuadraticForm":
        return ComplexQuadraticForm(self.q + other.q, self.l + other.l,
                                    self.s + other.s, self.log_norm + other.log_norm)

    def norm(self) -> float:
        """Total probability, integrating |psi|^2 over dx1 dx2."""
        a = 2 * self.q.real
        b = 2 * self.l.real
        if not (a[0, 0] > 0 and np.linalg.det(a) > 0):
            raise DegenerateConfiguration("form is not normalizable")
        # int exp(-x.a x - b.x) d^2x = pi/sqrt(det a) exp(b.a^-1 b / 4)
        quad = b @ np.linalg.solve(a, b) / 4
        log_int = math.log(math.pi) - 0.5 * math.log(np.linalg.det(a)) + quad
        return 2.0 * math.exp(2 * self.log_norm.real - 2 * self.s.real + log_int)

    def normalized(self) -> "ComplexQuadraticForm":
        return replace(self, log_norm=self.log_norm - 0.5 * math.log(self.norm()))

    def mean(self) -> np.ndarray:
        """Mean of (r, q) under |psi|^2."""
        a = 2 * self.q.real
        return -np.linalg.solve(a, 2 * self.l.real) / 2

    def propagate(self, distance: float, k0: float) -> "ComplexQuadraticForm":
        """Free flight over ``distance`` with the unitary kernel in (r, q)."""
        if distance == 0:
            return self
        if distance < 0:
            raise ValueError("distance must be non-negative")
        # written with t = distance/k0 instead of k0/distance so that short
        # flights stay finite.  With N = 1 + i t Q the kernel integral gives
        # Q' = Q N^-1, l' = N^-1 l, s' = s - (i t / 4) l.N^-1 l.  Far from
        # focus Re Q' is tiny next to the chirp, so Q' is built from the
        # exact update Q'^-1 = Q^-1 + i t, which keeps Re Q' accurate.
        t = distance / k0
        if t == 0:
            return self
        n = np.eye(2) + 1j * t * self.q
        n11 = n[0, 0]
        schur = n[1, 1] - n[0, 1] * n[1, 0] / n11
        if n11.imag <= 0 or schur.imag <= 0:
            raise DegenerateConfiguration("propagation integral does not converge")
        p_inv = np.linalg.inv(self.q)
        q_new = np.linalg.inv(p_inv + 1j * t * np.eye(2))
        q_new = 0.5 * (q_new + q_new.T)
        ninv = q_new @ p_inv
        l_new = ninv @ self.l
        s_new = self.s - 0.25j * t * (self.l @ ninv @ self.l)
        # one 1/sqrt per coordinate, each on its principal branch
        step = -0.5 * (cmath.log(n11) + cmath.log(schur))
        return ComplexQuadraticForm(q_new, l_new, complex(s_new), self.log_norm + step)


def initial_form(params: SourceParams) -> ComplexQuadraticForm:
    """Source state exp(-q^2/sigma^2 - r^2/Omega^2)/sqrt(pi sigma Omega)."""
    q = np.diag([1 / params.omega_cap ** 2, 1 / params.sigma ** 2]).astype(complex)
    return ComplexQuadraticForm(q, np.zeros(2), 0j,
                                complex(-0.5 * math.log(math.pi * params.sigma * params.omega_cap)))


def window_form(c1: float, beta_a: float, c2: float, beta_b: float) -> ComplexQuadraticForm:
    """Gaussian windows exp(-(x1-c1)^2/2beta_a^2 - (x2-c2)^2/2beta_b^2) in (r, q)."""
    u1 = 0.0 if math.isinf(beta_a) else 1 / (2 * beta_a ** 2)
    u2 = 0.0 if math.isinf(beta_b) else 1 / (2 * beta_b ** 2)
    q = np.array([[u1 + u2, u1 - u2], [u1 - u2, u1 + u2]], dtype=complex)
    l = np.array([-2 * (c1 * u1 + c2 * u2), -2 * (c1 * u1 - c2 * u2)], dtype=complex)
    return ComplexQuadraticForm(q, l, complex(c1 * c1 * u1 + c2 * c2 * u2), 0j)


def path_window(geom: SlitGeometry, path: PathLabel) -> ComplexQuadraticForm:
    s1, s2 = path.slits()
    half = geom.d / 2
    c1, b1 = (half, geom.beta1) if s1 == 1 else (-half, geom.beta2)
    c2, b2 = (half, geom.beta1) if s2 == 1 else (-half, geom.beta2)
    return window_form(c1, b1, c2, b2)


def gaussian_propagate(initial: ComplexQuadraticForm, window: ComplexQuadraticForm,
                       distances: tuple[float, float], params: SourceParams) -> ComplexQuadraticForm:
    """Source -> free flight z -> window -> free flight z_tau, exactly."""
    z, z_tau = distances
    if not initial.normalizable:
        raise DegenerateConfiguration("initial state is not normalizable")
    at_slit = initial.propagate(z, params.k0)
    return at_slit.times(window).propagate(z_tau, params.k0)


def path_form(params: SourceParams, geom: SlitGeometry, path: PathLabel) -> ComplexQuadraticForm:
    """Exact (transmission-weighted) wavefunction of one path at the screen."""
    return gaussian_propagate(initial_form(params), path_window(geom, path),
                              (geom.z, geom.z_tau), params)


def wavepacket_from_form(form: ComplexQuadraticForm, path: PathLabel, params: SourceParams,
                         beta_used: tuple[float, float], tol: float = 1e-12) -> SlitWavepacket:
    """Read the closed-form parameters back out of an exact form."""
    Q, l = form.q, form.l
    scale = abs(Q[0, 0]) + abs(Q[1, 1])
    coupled = abs(Q[0, 1]) > tol * scale
    b2 = 1 / Q[0, 0].real
    bt2 = 1 / Q[1, 1].real
    k0 = params.k0
    if path.same_slit:
        sep, delta = -b2 * l[0].real, -l[0].imag
    else:
        sep, delta = -bt2 * l[1].real, -l[1].imag
    return SlitWavepacket(path=path, b=math.sqrt(b2), b_tilde=math.sqrt(bt2),
                          inv_r_plus=-Q[0, 0].imag / k0, inv_r_minus=-Q[1, 1].imag / k0,
                          separation=float(sep), delta=float(delta), theta=float(-form.s.imag),
                          zeta_slit=float(form.log_norm.imag), beta_used=beta_used, k0=k0,
                          coupled=coupled, form=form)


def slit_wavepacket(params: SourceParams, geom: SlitGeometry, path: PathLabel,
                    method: str = "auto") -> SlitWavepacket:
    """Wavepacket of ``path`` at the screen.

    ``method="closed"`` forces the closed forms (equal widths only),
    ``"integrator"`` the exact route; ``"auto"`` uses closed forms where
    they apply.  The exact form is attached in every case.
    """
    s1, s2 = path.slits()
    beta_used = (geom.beta1 if s1 == 1 else geom.beta2, geom.beta1 if s2 == 1 else geom.beta2)
    form = path_form(params, geom, path)
    if method == "integrator" or (method == "auto" and beta_used[0] != beta_used[1]):
        return wavepacket_from_form(form, path, params, beta_used)
    if method not in ("auto", "closed"):
        raise ValueError(f"unknown method {method!r}")
    return replace(closed_form_wavepacket(params, geom, path), form=form)
