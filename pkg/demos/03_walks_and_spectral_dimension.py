"""Estimate the spectral dimension of a condensation-phase limit from a
handful of large balls.  Return probabilities should decay like n^(-d_s/2)."""
from bipmaps import laws_for, power_law_with_kappa
from bipmaps.walks import spectral_ensemble

laws = laws_for(power_law_with_kappa(0.5, 4.0))
ens = spectral_ensemble(laws, maps=6, walkers=500, seed=3)
fit = ens.fit
print(f"pooled d_s = {fit.ds_estimate:.3f} +- {fit.stderr:.3f}")
print(f"per-map d_s: {', '.join(f'{x:.2f}' for x in ens.per_map_ds)}")
print(f"smallest ball: {min(ens.ball_sizes)} vertices")
