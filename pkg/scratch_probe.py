"""Scratch probe: flip location of the upper/lower predicates on consistent data."""
import numpy as np
from eitrecon import (
    build_structured_mesh, layer_order, ConductivityField, assemble_system,
    build_basis, assemble_nd, loewner_geq, ReconProblem, reconstruct, test_matrix,
)

def probe(rows, cols, h, gamma, M, c=1.0):
    mesh, part = build_structured_mesh(rows, cols, h, gamma)
    order = layer_order(part, mesh)
    basis = build_basis(mesh, M)
    sys_true = assemble_system(mesh, part, ConductivityField.uniform(part.pixel_count, c))
    A = assemble_nd(sys_true, basis, M)
    print(f"--- {rows}x{cols} h={h} gamma={gamma} M={M} c={c} order={order}")
    for variant in ("upper", "lower"):
        prob = ReconProblem(mesh, part, A, variant=variant, order=order)
        # flip scan for m=1
        ts = np.geomspace(c/100, c*100, 33)
        verdicts = []
        for t in ts:
            B = test_matrix(prob, 1, t, [])
            v = loewner_geq(A, B, prob.tol_loewner) if variant == "upper" else loewner_geq(B, A, prob.tol_loewner)
            verdicts.append(v.holds)
        # find flip(s)
        flips = [(ts[i], ts[i+1]) for i in range(len(ts)-1) if verdicts[i] != verdicts[i+1]]
        print(f"  {variant}: m=1 verdict pattern {''.join('T' if v else 'f' for v in verdicts)}")
        print(f"  {variant}: flips at {[(f'{a:.3g}', f'{b:.3g}') for a,b in flips]}")
        res = reconstruct(prob)
        vals = res.value_array(part.pixel_count)
        print(f"  {variant}: recon status={res.status} values={np.array2string(vals, precision=5)}")

probe(2, 2, 1/16, ("bottom",), 8)
probe(2, 2, 1/16, ("bottom", "left"), 8)
probe(3, 3, 1/18, ("bottom", "left"), 12, c=2.0)
