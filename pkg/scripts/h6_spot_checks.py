"""QCCSD on the H6 / STO-3G chain (12 qubits, 117 parameters) at a few spacings.

    python scripts/h6_spot_checks.py [spacing ...]
"""

import sys
import time

from qccsd.exact import fci_ground_state, hf_ground_overlap
from qccsd.integrals import hydrogen_chain_integrals
from qccsd.vqe import build_problem, minimize


def run(spacings):
    print("bond_length,e_hf,e_fci,e_qccsd,err_qccsd,overlap_hf,iters,converged,seconds")
    for r in spacings:
        t0 = time.perf_counter()
        mi = hydrogen_chain_integrals(6, r)
        ground, hf = fci_ground_state(mi)
        res = minimize(build_problem(mi))
        print(
            f"{r:.3f},{mi.scf_energy:.10f},{ground.energy:.10f},{res.energy:.10f},"
            f"{res.energy - ground.energy:.3e},{hf_ground_overlap(ground, hf):.4f},"
            f"{res.iterations},{str(res.converged).lower()},{time.perf_counter() - t0:.1f}",
            flush=True,
        )


if __name__ == "__main__":
    run([float(a) for a in sys.argv[1:]] or [0.75, 1.0, 1.5])
