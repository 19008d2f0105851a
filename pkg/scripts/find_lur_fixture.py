"""Randomized search for a state caught by the variance test but not by the linear witness.

Candidates are mixtures of GHZ_3 with a random product state. The first hit
for the fixed seed is written as a dense JSON matrix of ``[re, im]`` pairs.
"""

import json
import sys

import numpy as np

from stabwit.nonlinear import lur_ghz
from stabwit.states import DensityMatrix, make_ghz, random_product_state
from stabwit.witnesses import ghz_two_term

N, K = 3, 1
MARGIN = 1e-3


def search(seed: int = 0xC0FFEE, tries: int = 100_000) -> DensityMatrix:
    rng = np.random.default_rng(seed)
    ghz = make_ghz(N).density().matrix
    witness = ghz_two_term(N, K + 1)
    for _ in range(tries):
        weight = rng.uniform(0.3, 0.8)
        prod = random_product_state(N, rng).density().matrix
        rho = DensityMatrix(N, weight * ghz + (1 - weight) * prod)
        if witness.expectation(rho) > MARGIN and lur_ghz(rho, N, K).total < -MARGIN:
            return rho
    raise RuntimeError("no fixture state found")


def main(path: str) -> None:
    rho = search()
    rows = [[[z.real, z.imag] for z in row] for row in rho.matrix]
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/data/lur_fixture.json")
