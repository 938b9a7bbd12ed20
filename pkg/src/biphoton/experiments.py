"""Built-in scenarios: each one produces the data series behind one figure or table."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace

import numpy as np

from .entanglement import cross_correlation, free_cross_correlation, wavepacket_negativity
from .interference import find_measurement_point, screen_pattern, visibility_closed
from .params import ConfigError, SlitGeometry, SourceParams, default_source
from .propagation import PathLabel, free_gouy, slit_gouy, slit_wavepacket
from .results import ResultSet

SCENARIOS = ("fig2-top", "fig2-bottom", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8",
             "table1", "fig9", "custom")

TABLE1_BETA1_UM = (10, 15, 20, 30, 36, 40, 45, 50)

# header suffix and scale for each sweepable field
UNITS = {"lam": ("nm", 1e-9), "sigma": ("um", 1e-6), "omega_cap": ("um", 1e-6),
         "z": ("mm", 1e-3), "z_tau": ("mm", 1e-3), "d": ("um", 1e-6),
         "beta1": ("um", 1e-6), "beta2": ("um", 1e-6)}


@dataclass(frozen=True)
class SweepAxis:
    variable: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.variable not in UNITS:
            raise ConfigError(f"cannot sweep {self.variable!r}; choose from {sorted(UNITS)}")
        if self.count < 1:
            raise ConfigError("sweep count must be positive")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    @property
    def header(self) -> str:
        return f"{self.variable}_{UNITS[self.variable][0]}"


@dataclass(frozen=True)
class Scenario:
    id: str
    params: SourceParams
    geom: SlitGeometry
    sweep: SweepAxis | None = None
    outputs: tuple[str, ...] = ("csv",)
    grid: int | None = None

    def __post_init__(self):
        if self.id not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.id!r}")


def worker_count() -> int:
    raw = os.environ.get("BIPHOTON_THREADS")
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"BIPHOTON_THREADS={raw!r} is not an integer") from exc
        return max(1, n)
    return os.cpu_count() or 1


def pmap(fn, items) -> list:
    """Map over ``items`` on a bounded pool; output order follows input order."""
    items = list(items)
    workers = min(worker_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _source_meta(params: SourceParams) -> dict:
    return {k: v for k, v in asdict(params).items() if v is not None}


def _meta(s: Scenario, **extra) -> dict:
    meta = {"scenario": s.id, "params": _source_meta(s.params), "geometry": asdict(s.geom)}
    if s.sweep is not None:
        meta["sweep"] = asdict(s.sweep)
    meta.update(extra)
    return meta


def _apply(params: SourceParams, geom: SlitGeometry, variable: str, value: float):
    if variable in {f.name for f in fields(SourceParams)}:
        return replace(params, **{variable: value}), geom
    return params, replace(geom, **{variable: value})


# --------------------------------------------------------------------------
# defaults


def table1_source() -> SourceParams:
    return SourceParams(lam=702e-9, sigma=11.4e-6, omega_cap=114e-6)


def builtin(scenario_id: str, params: SourceParams | None = None,
            geom: SlitGeometry | None = None, grid: int | None = None) -> Scenario:
    """Scenario with the parameter set of the matching figure."""
    src = default_source()
    fig56 = SourceParams(lam=702e-9, sigma=11.4e-6, omega_cap=114e-6)
    defaults = {
        "fig2-top": (src, SlitGeometry(1.2e-3, 0.0, 0.0, 40e-6, 40e-6),
                     SweepAxis("z_tau", 0.0, 0.1, 201)),
        "fig2-bottom": (src, SlitGeometry(1.2e-3, 0.0, 0.0, 35e-6, 35e-6),
                        SweepAxis("z_tau", 0.0, 0.1, 201)),
        "fig3": (src, SlitGeometry(2e-3, 0.07, 100e-6, 60e-6, 60e-6), None),
        "fig4": (src, SlitGeometry(2e-3, 0.07, 0.0, 60e-6, 60e-6),
                 SweepAxis("beta1", 5e-6, 200e-6, 196)),
        "fig5": (fig56, SlitGeometry(0.5, 0.0, 100e-6, 5e-6, 5e-6),
                 SweepAxis("z_tau", 0.0, 0.5, 501)),
        "fig6": (fig56, SlitGeometry(0.5, 0.5, 100e-6, 5e-6, 5e-6), None),
        "fig7": (src, SlitGeometry(1e-3, 0.07, 200e-6, 60e-6, 60e-6), None),
        "fig8": (src, SlitGeometry(2e-3, 0.07, 200e-6, 60e-6, 5e-6), None),
        "table1": (table1_source(), SlitGeometry(2e-3, 0.07, 200e-6, 36e-6, 5e-6), None),
        "fig9": (table1_source(), SlitGeometry(2e-3, 0.07, 200e-6, 36e-6, 5e-6),
                 SweepAxis("beta1", 10e-6, 60e-6, 101)),
        "custom": (table1_source(), SlitGeometry(2e-3, 0.07, 200e-6, 60e-6, 5e-6), None),
    }
    if scenario_id not in defaults:
        raise ConfigError(f"unknown scenario {scenario_id!r}")
    p, g, sweep = defaults[scenario_id]
    return Scenario(scenario_id, params or p, geom or g, sweep, grid=grid)


# --------------------------------------------------------------------------
# runners


def _fig2_top(s: Scenario) -> ResultSet:
    zt = s.sweep.values()
    cols = {"z_tau_mm": zt * 1e3}
    for ratio in (3.5, 5.0, 10.0):
        p = s.params.with_ratio(ratio)
        label = f"{ratio:g}".replace(".", "p")
        cols[f"zeta_omega_{label}sigma_rad"] = [slit_gouy(p, s.geom.z, t, s.geom.beta1) for t in zt]
    return ResultSet(cols, _meta(s))


def _fig2_bottom(s: Scenario) -> ResultSet:
    zt = s.sweep.values()
    cols = {"z_tau_mm": zt * 1e3}
    for beta in (35e-6, 65e-6):
        cols[f"zeta_beta_{beta * 1e6:g}um_rad"] = [slit_gouy(s.params, s.geom.z, t, beta) for t in zt]
    cols["zeta_free_rad"] = free_gouy(s.params, s.geom.z + zt)
    return ResultSet(cols, _meta(s))


def _uu_negativity(params, geom) -> float:
    return wavepacket_negativity(slit_wavepacket(params, geom, PathLabel.UU))


def _fig3(s: Scenario) -> ResultSet:
    n = s.grid or 101
    zs = np.linspace(0.0, 20e-3, n)
    zts = np.linspace(0.0, 0.2, n)
    cols = {"z_mm": zs * 1e3}
    for d in (100e-6, 180e-6):
        for beta in (50e-6, 60e-6):
            g0 = SlitGeometry(0.0, 0.07, d, beta, beta)
            cols[f"e_n_vs_z_d{d * 1e6:g}um_beta{beta * 1e6:g}um"] = pmap(
                lambda z: _uu_negativity(s.params, replace(g0, z=z)), zs)
    cols["z_tau_mm"] = zts * 1e3
    for d in (100e-6, 180e-6):
        for beta in (60e-6, 70e-6):
            g0 = SlitGeometry(2e-3, 0.0, d, beta, beta)
            cols[f"e_n_vs_ztau_d{d * 1e6:g}um_beta{beta * 1e6:g}um"] = pmap(
                lambda zt: _uu_negativity(s.params, replace(g0, z_tau=zt)), zts)
    wide = 1e4 * s.params.sigma
    cols["e_n_wide_slit"] = [_uu_negativity(s.params, SlitGeometry(2e-3, zt, 100e-6, wide, wide))
                             for zt in zts]
    return ResultSet(cols, _meta(s, wide_slit_m=wide))


def _fig4(s: Scenario) -> ResultSet:
    betas = s.sweep.values()

    def point(beta):
        g = replace(s.geom, beta1=beta, beta2=beta)
        return _uu_negativity(s.params, g), slit_gouy(s.params, g.z, g.z_tau, beta)

    vals = pmap(point, betas)
    return ResultSet({"beta_um": betas * 1e6, "e_n": [v[0] for v in vals],
                      "zeta_rad": [v[1] for v in vals]},
                     _meta(s, note="slit separation set to 0 for this curve; the caption quotes "
                                   "200 mm elsewhere"))


def _fig5(s: Scenario) -> ResultSet:
    zts = s.sweep.values()
    cols = {"z_tau_mm": zts * 1e3}
    reports = {}
    for z in (0.5, 8e-3):
        tag = f"z{z * 1e3:g}mm"
        for path in (PathLabel.UU, PathLabel.UD):
            reps = pmap(lambda zt: cross_correlation(
                slit_wavepacket(s.params, replace(s.geom, z=z, z_tau=zt), path)), zts)
            reports[(tag, path)] = reps
            cols[f"rho_{path.value}_{tag}"] = [r.rho_moment for r in reps]
    for (tag, path), reps in reports.items():
        cols[f"pearson_{path.value}_{tag}"] = [r.rho for r in reps]
    cols["rho_free_z500mm"] = [free_cross_correlation(s.params, 0.5 + zt) for zt in zts]
    return ResultSet(cols, _meta(s, reading="rho columns divide raw second moments; pearson "
                                            "columns are centred"))


def _fig6(s: Scenario) -> ResultSet:
    grid = np.linspace(-4e-3, 4e-3, s.grid or 2001)
    cols = {"r_mm": grid * 1e3}
    for tag, z in (("top", s.geom.z), ("bottom", 8e-3)):
        sp = screen_pattern(s.params, replace(s.geom, z=z), grid)
        peak = sp.i4.max()
        for name in ("i4", "i2", "i2_prime"):
            cols[f"{name}_{tag}"] = getattr(sp, name) / peak
    return ResultSet(cols, _meta(s, normalisation="all three series share the peak of i4",
                                 z_bottom_m=8e-3))


FIG7_OMEGAS = (0.01e-3, 0.03e-3, 0.05e-3, 0.06e-3, 0.09e-3, 0.28e-3)


def _fig7(s: Scenario) -> ResultSet:
    n = s.grid or 801
    grid = np.linspace(-1e-3, 1e-3, n)
    cols = {"r_mm": grid * 1e3}
    curve_en = {}
    for omega in FIG7_OMEGAS:
        p = replace(s.params, omega_cap=omega)
        wp = slit_wavepacket(p, s.geom, PathLabel.UU)
        key = f"vis_omega_{omega * 1e6:g}um"
        cols[key] = visibility_closed(wp, grid)
        curve_en[key] = wavepacket_negativity(wp)
    omegas = np.linspace(0.005e-3, 0.3e-3, n)
    cols["omega_mm"] = omegas * 1e3
    cols["e_n_vs_omega"] = pmap(lambda o: _uu_negativity(replace(s.params, omega_cap=o), s.geom),
                                omegas)
    return ResultSet(cols, _meta(s, curve_negativity=curve_en))


def _fig8(s: Scenario) -> ResultSet:
    grid = np.linspace(-1e-3, 1e-3, s.grid or 2001)
    sp = screen_pattern(s.params, s.geom, grid)
    f = sp.i2 / np.where(sp.ir > 0, sp.ir, np.inf)
    f = np.where(sp.excluded, np.nan, f)
    return ResultSet({"r_mm": grid * 1e3, "ir_4psi": sp.i4 / f, "ir_2psi": sp.ir, "vis": sp.vis},
                     _meta(s))


def table1_rows(params: SourceParams, geom: SlitGeometry, betas_um=TABLE1_BETA1_UM):
    return pmap(lambda b: find_measurement_point(params, replace(geom, beta1=b * 1e-6)), betas_um)


def _table1(s: Scenario) -> ResultSet:
    rows = table1_rows(s.params, s.geom)
    return ResultSet({
        "r_mm": [m.r_star * 1e3 for m in rows],
        "beta1_um": list(TABLE1_BETA1_UM),
        "gouy_diff_rad": [m.gouy_diff for m in rows],
        "e_n": [math.nan if m.e_n_linear is None else m.e_n_linear for m in rows],
    }, _meta(s, n=[m.n for m in rows], e_n_rule="(gouy_diff - 0.48)/0.16, nan where negative"))


def _fig9(s: Scenario) -> ResultSet:
    betas = s.sweep.values()

    def point(b):
        g = replace(s.geom, beta1=b)
        gd = abs(slit_gouy(s.params, g.z, g.z_tau, b) - slit_gouy(s.params, g.z, g.z_tau, g.beta2))
        en = wavepacket_negativity(slit_wavepacket(s.params, replace(g, beta2=b), PathLabel.UU))
        lin = (gd - 0.48) / 0.16
        return gd, en, lin if lin >= 0 else math.nan

    vals = pmap(point, betas)
    return ResultSet({"beta1_um": betas * 1e6, "gouy_diff_rad": [v[0] for v in vals],
                      "e_n": [v[1] for v in vals], "e_n_linear": [v[2] for v in vals]}, _meta(s))


def observables(params: SourceParams, geom: SlitGeometry) -> dict[str, float]:
    """Headline numbers for one configuration."""
    uu = slit_wavepacket(params, geom, PathLabel.UU)
    dd = slit_wavepacket(params, geom, PathLabel.DD)
    ud = slit_wavepacket(params, geom, PathLabel.UD)
    c_uu, c_ud = cross_correlation(uu), cross_correlation(ud)
    return {"zeta_uu_rad": uu.zeta_slit, "zeta_dd_rad": dd.zeta_slit,
            "gouy_diff_rad": abs(uu.zeta_slit - dd.zeta_slit),
            "e_n": wavepacket_negativity(uu),
            "rho_uu": c_uu.rho, "rho_ud": c_ud.rho,
            "rho_uu_moment": c_uu.rho_moment, "rho_ud_moment": c_ud.rho_moment}


def _custom(s: Scenario) -> ResultSet:
    if s.sweep is None:
        row = observables(s.params, s.geom)
        return ResultSet({k: [v] for k, v in row.items()}, _meta(s))
    values = s.sweep.values()
    scale = UNITS[s.sweep.variable][1]
    rows = pmap(lambda v: observables(*_apply(s.params, s.geom, s.sweep.variable, v)), values)
    cols = {s.sweep.header: values / scale}
    for key in rows[0]:
        cols[key] = [r[key] for r in rows]
    return ResultSet(cols, _meta(s))


_RUNNERS = {"fig2-top": _fig2_top, "fig2-bottom": _fig2_bottom, "fig3": _fig3, "fig4": _fig4,
            "fig5": _fig5, "fig6": _fig6, "fig7": _fig7, "fig8": _fig8, "table1": _table1,
            "fig9": _fig9, "custom": _custom}


class ScenarioError(RuntimeError):
    def __init__(self, scenario_id: str, cause: Exception):
        super().__init__(f"scenario {scenario_id}: {cause}")
        self.scenario_id = scenario_id
        self.cause = cause


def run_scenario(s: Scenario) -> ResultSet:
    try:
        return _RUNNERS[s.id](s)
    except ConfigError:
        raise
    except (ArithmeticError, ValueError) as exc:
        raise ScenarioError(s.id, exc) from exc
