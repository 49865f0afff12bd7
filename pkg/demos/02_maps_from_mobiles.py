"""Sample a labeled mobile, turn it into a map, and check the map against
the mobile it came from."""
from bipmaps import FaceWeights, RngStream, laws_for
from bipmaps.bdg import map_checks, phi_build
from bipmaps.samplers import sample_mobile_n

laws = laws_for(FaceWeights.bimodal())
mobile = sample_mobile_n(laws, 40, RngStream(2026, 0))
pm = phi_build(mobile)

print(f"{pm.n_vertices} vertices, {pm.n_edges} edges, {pm.n_faces} faces")
print("face degrees:", sorted(set(pm.face_degrees().tolist())))
report = map_checks(pm, mobile)
print("all structural checks pass" if report.ok else report.violations)

# Exhaustive check of the tree/mobile bijection on every small case.
from bipmaps.oracle import bijection_suite

print(bijection_suite(max_n=4).to_dict())
