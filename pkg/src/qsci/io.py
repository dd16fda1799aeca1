"""JSON text formats shared by the library and the command line.

Complex numbers are ``[re, im]`` pairs; real arrays may be plain numbers.
"""
from __future__ import annotations

import json
import os
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InputError

BIT_ORDER = "big-endian"


def atomic_write_text(path, text: str):
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_json(obj, path=None, indent: int = 2) -> str:
    text = json.dumps(obj, indent=indent) + "\n"
    if path is not None:
        atomic_write_text(path, text)
    return text


def load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc


def bundled(name: str) -> Path:
    """Path of a data file shipped inside the package."""
    return Path(str(resources.files("qsci") / "data" / name))


def _number(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise InputError(f"complex entries must be [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    if isinstance(x, (int, float)):
        return complex(x)
    raise InputError(f"not a number: {x!r}")


def _encode(z: complex, real: bool):
    return float(z.real) if real else [float(z.real), float(z.imag)]


def vector_to_json(v) -> list:
    v = np.asarray(v, dtype=complex).reshape(-1)
    real = not np.any(v.imag)
    return [_encode(z, real) for z in v]


def vector_from_json(data) -> np.ndarray:
    if isinstance(data, dict):
        data = data.get("data", data.get("amplitudes", data.get("solution")))
    if not isinstance(data, list) or not data:
        raise InputError("vector file must hold a nonempty array")
    return np.array([_number(x) for x in data], dtype=complex)


def matrix_to_json(M, fmt: str = "dense") -> dict:
    M = np.asarray(M, dtype=complex)
    real = not np.any(M.imag)
    if fmt == "dense":
        data = [_encode(z, real) for z in M.reshape(-1)]
    elif fmt == "coo":
        rows, cols = np.nonzero(M)
        data = [[int(i), int(j), _encode(M[i, j], real)] for i, j in zip(rows, cols)]
    else:
        raise InputError(f"unknown matrix format {fmt!r}")
    return {"n": int(M.shape[0]), "format": fmt, "data": data}


def matrix_from_json(d) -> np.ndarray:
    if not isinstance(d, dict) or "data" not in d:
        raise InputError("matrix file needs 'n', 'format' and 'data' fields")
    fmt = d.get("format", "dense")
    data = d["data"]
    if fmt == "dense":
        rows_n = int(d.get("n", len(data)))
        # nested rows: n lists of n entries (flat complex data has n*n pairs instead)
        if data and len(data) == rows_n and all(isinstance(r, list) and len(r) == rows_n for r in data):
            M = np.array([[_number(x) for x in r] for r in data], dtype=complex)
        else:
            flat = np.array([_number(x) for x in data], dtype=complex)
            n = int(d.get("n", round(np.sqrt(flat.size))))
            if flat.size != n * n:
                raise InputError(f"dense data has {flat.size} entries, expected {n * n}")
            M = flat.reshape(n, n)
    elif fmt == "coo":
        if "n" not in d:
            raise InputError("coo matrix needs its dimension 'n'")
        n = int(d["n"])
        M = np.zeros((n, n), dtype=complex)
        for entry in data:
            i, j, val = entry
            if not (0 <= int(i) < n and 0 <= int(j) < n):
                raise InputError(f"coo index ({i}, {j}) outside {n}x{n}")
            M[int(i), int(j)] += _number(val)
    else:
        raise InputError(f"unknown matrix format {fmt!r}")
    if "n" in d and M.shape != (int(d["n"]),) * 2:
        raise InputError(f"matrix shape {M.shape} does not match n={d['n']}")
    return M


def load_vector(path) -> np.ndarray:
    return vector_from_json(load_json(path))


def load_matrix(path) -> np.ndarray:
    return matrix_from_json(load_json(path))


def load_pauli_sum(path):
    from .encodings import PauliSum

    d = load_json(path)
    return PauliSum.from_list(d["pauli_sum"] if isinstance(d, dict) else d)


def load_phases(path):
    from .polynomials import PhaseSequence

    return PhaseSequence.from_dict(load_json(path))


def load_series(path):
    from .polynomials import ChebyshevSeries

    return ChebyshevSeries.from_dict(load_json(path))


def load_hamiltonian_spec(path):
    from .encodings import PauliSum
    from .hamiltonian import HamiltonianSpec

    d = load_json(path)
    if "pauli_sum" in d:
        return HamiltonianSpec(PauliSum.from_list(d["pauli_sum"]), t=float(d.get("t", 1.0)),
                               r=int(d.get("r", 1)), K=d.get("K"), eps=float(d.get("eps", 1e-8)))
    if "matrix" in d:
        return HamiltonianSpec(matrix=matrix_from_json(d["matrix"]), t=float(d.get("t", 1.0)),
                               r=int(d.get("r", 1)), K=d.get("K"), eps=float(d.get("eps", 1e-8)))
    raise InputError("Hamiltonian file needs 'pauli_sum' or 'matrix'")


def load_ode_problem(path):
    from .solvers.ode import ODEProblem

    d = load_json(path)
    try:
        A = matrix_from_json(d["A"]) if isinstance(d["A"], dict) else np.array(
            [[_number(x) for x in row] for row in d["A"]])
        return ODEProblem(A, vector_from_json(d["b"]), vector_from_json(d["x0"]), float(d["T"]),
                          int(d.get("k", 4)), int(d.get("m", 10)), d.get("p"))
    except KeyError as exc:
        raise InputError(f"ODE spec is missing field {exc}") from exc


def table_text(header, rows) -> str:
    """Whitespace-aligned table; the Trotter sweep and growth demos use it."""
    lines = ["  ".join(f"{h:>14}" for h in header)]
    for row in rows:
        lines.append("  ".join(f"{v:>14.6e}" if isinstance(v, float) else f"{v!s:>14}" for v in row))
    return "\n".join(lines) + "\n"


def table_csv(header, rows) -> str:
    import csv
    import io as _io

    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
