"""Print the measurement-point table next to reference values."""
import math
from dataclasses import replace

from biphoton.experiments import builtin
from biphoton.interference import constraint_roots, find_measurement_point

REFERENCE = {  # beta1 (um): (r (mm), Gouy difference (rad), E_N or None)
    10: (-0.123, 0.105, None), 15: (-0.123, 0.220, None), 20: (-0.123, 0.315, None),
    30: (-0.124, 0.436, None), 36: (-0.124, 0.486, 0.0254), 40: (-0.124, 0.515, 0.206),
    45: (-0.125, 0.548, 0.410), 50: (-0.125, 0.578, 0.598),
}


def fmt(v):
    return "   -   " if v is None or (isinstance(v, float) and math.isnan(v)) else f"{v:7.4f}"


def main() -> None:
    s = builtin("table1")
    print("beta1  r_ref    r       r(n=-2)  gouy_ref gouy    E_ref   E_N")
    for b, (r_ref, g_ref, e_ref) in REFERENCE.items():
        geom = replace(s.geom, beta1=b * 1e-6)
        m = find_measurement_point(s.params, geom)
        mirror = min((r for r, _ in constraint_roots(s.params, geom, n_values=[-2])),
                     key=lambda r: abs(r + r_ref * 1e-3), default=math.nan)
        print(f"{b:5d} {r_ref:7.3f} {m.r_star * 1e3:7.4f} {mirror * 1e3:8.4f} "
              f"{g_ref:7.3f} {m.gouy_diff:7.4f} {fmt(e_ref)} {fmt(m.e_n_linear)}")


if __name__ == "__main__":
    main()
