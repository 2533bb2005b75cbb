"""HF-ground-state overlap |<HF|FCI>|^2 along hydrogen-chain dissociation.

The overlap falls as the chain stretches, which is where the QCCSD error grows.

    python scripts/overlap_trend.py
"""

import numpy as np

from qccsd.exact import fci_ground_state, hf_ground_overlap
from qccsd.integrals import hydrogen_chain_integrals


def main():
    spacings = np.round(np.arange(0.5, 2.51, 0.25), 2)
    print("bond_length," + ",".join(f"h{n}" for n in (2, 4, 6)))
    for r in spacings:
        vals = []
        for n in (2, 4, 6):
            ground, hf = fci_ground_state(hydrogen_chain_integrals(n, float(r)))
            vals.append(f"{hf_ground_overlap(ground, hf):.6f}")
        print(f"{r:.2f}," + ",".join(vals))


if __name__ == "__main__":
    main()
