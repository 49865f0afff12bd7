"""Compare three weight sequences: which phase each lands in and what the
offspring law of the limiting tree looks like."""
from bipmaps import FaceWeights, laws_for, power_law_with_kappa

cases = {
    "all tree weights one": FaceWeights.uniform_tree(),
    "quadrangulations": FaceWeights.bimodal(),
    "heavy tail, kappa 1/2": power_law_with_kappa(0.5, 5.0),
}

for name, fw in cases.items():
    L = laws_for(fw)
    phase = "condensation" if L.kappa < 1 else "no condensation"
    print(f"{name}: kappa = {L.kappa:.4f} ({phase})")
    print("   pi_0..pi_5 =", " ".join(f"{L.pi(i):.4f}" for i in range(6)))

# With kappa < 1 the spine of the limiting tree stops after a geometric
# number of steps and ends at a vertex of infinite degree.
L = laws_for(power_law_with_kappa(0.8, 4.0))
print(f"spine stopping probability per step: {1 - L.kappa_tilde:.4f}")
