"""Collapse each decoration onto its star vertex, then compare the volume
and the resistance to the ball complement before and after."""
from bipmaps import RngStream, laws_for, power_law_with_kappa
from bipmaps.resistance import certified_star_structure, j_lambda, shorting_check, volume_profile

laws = laws_for(power_law_with_kappa(0.5, 5.0))
R = 16
ss = certified_star_structure(laws, R, RngStream(11, 0))
print(f"window map: {ss.pm.n_vertices} vertices; star map: {ss.star_pm.n_vertices} vertices")

vp = volume_profile(ss, [2, 4, 8, 16])
for r, w in zip(vp.radii, vp.omega):
    print(f"omega({r:2d}) = {w:6d}   omega/R^2 = {w / r**2:.2f}")

chk = shorting_check(ss, R)
print(f"R_eff map {chk['reff_map']:.3f} >= projected {chk['reff_projected']:.3f}: {chk['holds']}")
print(j_lambda(ss, R, 20.0))
