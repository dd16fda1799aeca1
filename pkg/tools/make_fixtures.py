"""Regenerate the data files bundled under src/qsci/data.

The QSP phase file comes from the test-oracle fitter in tests/qsp_oracle.py.
Run from the repository root: python tools/make_fixtures.py
"""
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

from qsp_oracle import fit_phases, phase_error  # noqa: E402

from qsci.io import dump_json, matrix_to_json, vector_to_json  # noqa: E402
from qsci.polynomials import inverse_coeffs  # noqa: E402

DATA = ROOT / "src" / "qsci" / "data"
PHASE_KAPPA, PHASE_EPS, PHASE_SCALE = 20.0, 1e-9, 0.8


def a3_system():
    values = np.concatenate([np.arange(-1, 0, 0.05), np.arange(0.05, 1.05, 0.05)])
    A = np.flipud(np.diag(values))
    b = np.ones(values.size) / np.sqrt(values.size)
    return A, b


def main():
    DATA.mkdir(exist_ok=True)
    A, b = a3_system()
    dump_json(matrix_to_json(A), DATA / "a3_matrix.json")
    dump_json(vector_to_json(b), DATA / "a3_rhs.json")

    series = inverse_coeffs(PHASE_KAPPA, PHASE_EPS).scaled(PHASE_SCALE)
    phases = fit_phases(series)
    phases.target = f"inverse: {PHASE_SCALE} * gamma / x on [-1, -1/kappa] U [1/kappa, 1]"
    phases.kappa, phases.eps = PHASE_KAPPA, PHASE_EPS
    print(f"phases: degree {phases.degree}, max grid error {phase_error(phases, series):.2e}")
    dump_json(phases.to_dict(), DATA / "a3_phases.json")

    dump_json({"A": matrix_to_json(-0.5 * np.eye(2)), "b": [1.0, 0.0], "x0": [1.0, 1.0],
               "T": 1.0, "k": 4, "m": 10, "p": 10}, DATA / "ode.json")
    dump_json(matrix_to_json(np.diag([0.5, 0.25])), DATA / "hhl_matrix.json")
    dump_json(vector_to_json(np.ones(2) / np.sqrt(2)), DATA / "hhl_rhs.json")


if __name__ == "__main__":
    main()
