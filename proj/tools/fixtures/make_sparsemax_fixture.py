"""Freeze simplex projections solved as quadratic programs."""
import sys
from pathlib import Path

import cvxpy as cp
import numpy as np


def project(z: np.ndarray) -> np.ndarray:
    p = cp.Variable(z.size)
    problem = cp.Problem(cp.Minimize(cp.sum_squares(p - z)), [p >= 0, cp.sum(p) == 1])
    problem.solve(solver=cp.CLARABEL, tol_gap_abs=1e-12, tol_gap_rel=1e-12, tol_feas=1e-12)
    return np.clip(p.value, 0.0, None)


def main(out: Path) -> None:
    rng = np.random.default_rng(20240917)
    cases = [np.array([0.0, 0.0]), np.array([3.0, 0.0, 0.0]), np.array([0.5, 0.1])]
    for _ in range(200):
        dim = int(rng.integers(2, 11))
        cases.append(rng.normal(0.0, rng.choice([0.3, 1.0, 3.0]), dim))
    with out.open("w") as f:
        for z in cases:
            p = project(z)
            f.write(" ".join(f"{v:.17g}" for v in z) + "\t" + " ".join(f"{v:.17g}" for v in p) + "\n")


if __name__ == "__main__":
    main(Path(sys.argv[1]))
