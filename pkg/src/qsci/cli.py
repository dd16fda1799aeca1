"""Command-line workbench: reproduce the demonstrations and run the solvers on files.

Exit codes: 0 success, 2 input error, 3 postselection failure, 4 tolerance not met.
The default seed comes from the QSCI_SEED environment variable (0 if unset).
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io
from .errors import InputError, PostselectionError, ToleranceError

EXIT_OK, EXIT_INPUT, EXIT_POSTSELECT, EXIT_TOLERANCE = 0, 2, 3, 4
SEED_ENV = "QSCI_SEED"
DEMOS = ("bell", "superposition", "qft", "trotter", "pauli-growth", "grover", "qlsa-figure")
ROUTES = ("qlsa-cheb", "qlsa-qsp", "qlsa-pd", "hhl", "ode", "poisson", "wave")


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV, "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise InputError(f"{SEED_ENV}={raw!r} is not an integer") from exc


def _emit(text: str, out):
    if out:
        io.atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _histogram_output(hist, args, extra=None) -> str:
    if args.csv:
        return io.table_csv(("outcome", "count"), sorted(hist.counts.items()))
    return io.dump_json({**(extra or {}), **hist.to_dict()})


# ---------------------------------------------------------------- demos

def _demo_bell(args):
    from .circuit import Circuit, sample

    c = Circuit(2).h(0).cx(0, 1).measure()
    hist = sample(c, args.shots or 5120, args.seed, workers=args.workers)
    return _histogram_output(hist, args, {"demo": "bell", "seed": args.seed})


def _demo_superposition(args):
    from .circuit import Circuit, sample

    c = Circuit(3).h([0, 1, 2]).measure()
    hist = sample(c, args.shots or 2**15, args.seed, workers=args.workers)
    return _histogram_output(hist, args, {"demo": "superposition", "seed": args.seed})


def _demo_qft(args):
    from .circuit import Circuit, sample
    from .subroutines import qft

    shots = args.shots or 2**20
    before = Circuit(5).h(list(range(5)))
    after = before.compose(qft(5))
    h_before = sample(Circuit(5, list(before.ops)).measure(), shots, args.seed, workers=args.workers)
    h_after = sample(after.measure(), shots, args.seed + 1, workers=args.workers)
    if args.csv:
        keys = sorted(set(h_before.counts) | set(h_after.counts))
        rows = [(k, h_before.counts.get(k, 0), h_after.counts.get(k, 0)) for k in keys]
        return io.table_csv(("outcome", "before", "after"), rows)
    return io.dump_json({"demo": "qft", "seed": args.seed, "bit_order": "big-endian",
                         "before": h_before.to_dict(), "after": h_after.to_dict()})


def _demo_trotter(args):
    from .encodings import PauliSum
    from .hamiltonian import trotter_error_sweep

    rows = trotter_error_sweep(PauliSum([(1.0, "X"), (1.0, "Z")]))
    header = ("t", "r", "order", "error")
    return io.table_csv(header, rows) if args.csv else io.table_text(header, rows)


def _demo_pauli_growth(args):
    from .encodings import pauli_decompose, pauli_reconstruct
    from .solvers.pde import laplacian_1d

    rows = []
    for k in range(1, 8):
        N = 2**k
        L = laplacian_1d(N)
        ps = pauli_decompose(L)
        err = float(np.max(np.abs(pauli_reconstruct(ps) - L)))
        rows.append((N, len(ps), err))
    header = ("N", "terms", "reconstruction_error")
    return io.table_csv(header, rows) if args.csv else io.table_text(header, rows)


def _demo_grover(args):
    from .subroutines import grover, optimal_grover_iterations

    n = args.qubits or 3
    marked = args.marked if args.marked is not None else 2**n - 1
    k = optimal_grover_iterations(2**n)
    hist = grover(n, marked, k, args.shots or 1024, args.seed)
    return _histogram_output(hist, args, {"demo": "grover", "marked": marked, "iterations": k, "seed": args.seed})


def _demo_qlsa_figure(args):
    from .solvers import LinearSystemProblem, qlsa_chebyshev, qlsa_qsp

    A = io.load_matrix(io.bundled("a3_matrix.json")).real
    b = io.load_vector(io.bundled("a3_rhs.json"))
    problem = LinearSystemProblem(A, b, 20.0, args.eps)
    if args.phases:
        report = qlsa_qsp(problem, io.load_phases(args.phases))
    else:
        report = qlsa_chebyshev(problem)
    exact = np.linalg.solve(A, b).real
    exact /= np.linalg.norm(exact)
    quantum = report.solution.real
    x = np.flipud(A).diagonal()
    rows = [(float(xi), float(q / quantum[-1]), float(e / exact[-1]), float(abs(q - e) / abs(e)))
            for xi, q, e in zip(x, quantum, exact)]
    header = ("x", "quantum", "classical", "relative_error")
    return io.table_csv(header, rows) if args.csv else io.table_text(header, rows)


_DEMO_FUNCS = {
    "bell": _demo_bell, "superposition": _demo_superposition, "qft": _demo_qft, "trotter": _demo_trotter,
    "pauli-growth": _demo_pauli_growth, "grover": _demo_grover, "qlsa-figure": _demo_qlsa_figure,
}


def cmd_demo(args) -> int:
    _emit(_DEMO_FUNCS[args.name](args), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- solve

def _system_from_args(args, default_kappa=None):
    from .solvers import LinearSystemProblem

    if args.matrix:
        A = io.load_matrix(args.matrix)
    else:
        A = io.load_matrix(io.bundled("a3_matrix.json"))
    if args.rhs:
        b = io.load_vector(args.rhs)
    elif args.matrix:
        raise InputError("--rhs is required together with --matrix")
    else:
        b = io.load_vector(io.bundled("a3_rhs.json"))
    kappa = args.kappa or default_kappa
    if kappa is None:
        raise InputError("--kappa is required")
    return LinearSystemProblem(A, b, kappa, args.eps, args.alpha)


def _classical_fields(A, b, x) -> dict:
    exact = np.linalg.solve(A, b)
    exact /= np.linalg.norm(exact)
    phase = np.vdot(x, exact)
    aligned = x * (phase / abs(phase) if abs(phase) else 1.0)
    nz = np.abs(exact) > 1e-12
    return {"fidelity": float(abs(np.vdot(exact, x)) ** 2),
            "relative_error": float(np.max(np.abs(aligned[nz] - exact[nz]) / np.abs(exact[nz])))}


def cmd_solve(args) -> int:
    from .solvers import linear, ode, pde

    route = args.route
    extra = {}
    if route in ("qlsa-cheb", "qlsa-qsp", "qlsa-pd", "hhl"):
        default_kappa = 20.0 if not args.matrix else None
        if route == "hhl" and not args.matrix:
            problem = linear.LinearSystemProblem(io.load_matrix(io.bundled("hhl_matrix.json")),
                                                 io.load_vector(io.bundled("hhl_rhs.json")),
                                                 args.kappa or 2.0, args.eps, args.alpha)
        else:
            problem = _system_from_args(args, default_kappa)
        if route == "qlsa-cheb":
            report = linear.qlsa_chebyshev(problem, check_kappa=args.check_kappa)
        elif route == "qlsa-qsp":
            phases = io.load_phases(args.phases or io.bundled("a3_phases.json"))
            report = linear.qlsa_qsp(problem, phases, check_kappa=args.check_kappa)
        elif route == "qlsa-pd":
            report = linear.qlsa_pd(problem)
        else:
            if route == "hhl" and not args.matrix and args.C is None and args.t0 is None:
                args.C, args.t0 = 0.25, 2 * np.pi
            report = linear.hhl(problem, args.m_bits, args.C, args.t0)
        extra = _classical_fields(problem.A, problem.b, report.solution)
    elif route == "ode":
        problem = io.load_ode_problem(args.spec or io.bundled("ode.json"))
        report = ode.ode_solve(problem, eps=args.eps)
        ref = ode.exact_final_state(problem)
        ref /= np.linalg.norm(ref)
        extra = {"fidelity": float(abs(np.vdot(ref, report.solution)) ** 2)}
    elif route == "poisson":
        n = args.n or 8
        f = io.load_vector(args.rhs) if args.rhs else np.ones(n**args.d)
        report = pde.poisson_solve(n, f, args.d, "pd", args.eps)
        L = pde.kron_sum_laplacian(pde.laplacian_1d(n), args.d)
        extra = _classical_fields(L, f, report.solution)
    else:  # wave
        n = args.n or 4
        phi0 = np.zeros(n)
        phi0[n // 2] = 1.0
        psi = pde.wave_evolve(n, phi0, args.t, args.h)
        H, B = pde.wave_lift(n, args.h)
        norm_err = abs(np.linalg.norm(psi) - 1.0)
        doc = {"route": "wave", "n": n, "t": args.t, "h": args.h, "state": io.vector_to_json(psi),
               "phi_v": io.vector_to_json(psi[:n]), "norm_error": norm_err,
               "factorization_residual": float(np.max(np.abs(B @ B.T - pde.laplacian_1d(n)))),
               "bit_order": "big-endian"}
        _emit(io.dump_json(doc), args.out)
        return EXIT_OK

    doc = {**report.to_dict(), **extra}
    if args.csv:
        rows = [(i, float(z.real), float(z.imag)) for i, z in enumerate(report.solution)]
        _emit(io.table_csv(("index", "re", "im"), rows), args.out)
    else:
        _emit(io.dump_json(doc), args.out)
    if args.tol is not None:
        measure = extra.get("relative_error")
        if measure is None and "fidelity" in extra:
            measure = 1 - extra["fidelity"]
        if measure is not None and measure > args.tol:
            print(f"tolerance not met: {measure:.3e} > {args.tol:.3e}", file=sys.stderr)
            return EXIT_TOLERANCE
    return EXIT_OK


# ---------------------------------------------------------------- validate

def _classify(d) -> str:
    if isinstance(d, dict):
        for key, kind in (("phases", "phases"), ("coefficients", "series"), ("counts", "histogram"),
                          ("ops", "circuit"), ("x0", "ode"), ("pauli_sum", "hamiltonian"), ("data", "matrix")):
            if key in d:
                return kind
        return "unknown"
    if isinstance(d, list) and d and isinstance(d[0], list) and len(d[0]) == 2 and isinstance(d[0][1], str):
        return "pauli"
    if isinstance(d, list):
        return "vector"
    return "unknown"


def validate_document(d, purpose: str | None = None) -> list:
    """Human-readable problems with a parsed file; empty when it is usable."""
    from .circuit import Circuit, Histogram
    from .encodings import PauliSum, is_hermitian
    from .polynomials import ChebyshevSeries, PhaseSequence

    kind = _classify(d)
    issues = []
    try:
        if kind == "phases":
            if d.get("parity") is None:
                issues.append("phase file: missing 'parity'")
            ps = PhaseSequence.from_dict(d)
            ps.check_parity()
            if not np.all(np.isfinite(ps.phases)):
                issues.append("phase file: non-finite angle")
            for key in ("target", "kappa", "eps"):
                if d.get(key) is None:
                    issues.append(f"phase file: missing '{key}'")
        elif kind == "series":
            s = ChebyshevSeries.from_dict(d)
            if s.sup_norm() > 1 + 1e-9:
                issues.append(f"series: max |P| = {s.sup_norm():.6g} exceeds 1 on [-1, 1]")
        elif kind == "histogram":
            Histogram.from_dict(d)
            if d.get("bit_order", "big-endian") != "big-endian":
                issues.append("histogram: bit_order is not big-endian")
        elif kind == "circuit":
            Circuit.from_dict(d)
        elif kind == "pauli":
            ps = PauliSum.from_list(d)
            if purpose in ("hhl", "hamiltonian") and not ps.is_real():
                issues.append("Pauli sum: complex coefficients, not Hermitian")
        elif kind == "hamiltonian":
            ps = PauliSum.from_list(d["pauli_sum"])
            if not ps.is_real():
                issues.append("Hamiltonian: complex Pauli coefficients, not Hermitian")
        elif kind == "ode":
            from .solvers.ode import ODEProblem

            A = io.matrix_from_json(d["A"])
            ODEProblem(A, io.vector_from_json(d["b"]), io.vector_from_json(d["x0"]), float(d["T"]),
                       int(d.get("k", 4)), int(d.get("m", 10)), d.get("p"))
        elif kind == "matrix":
            M = io.matrix_from_json(d)
            if purpose in ("hhl", "qlsa-pd", "hamiltonian") and not is_hermitian(M):
                issues.append(f"matrix: not Hermitian (required for {purpose})")
            if purpose == "qlsa-pd" and is_hermitian(M) and np.linalg.eigvalsh(M).min() <= 0:
                issues.append("matrix: not positive definite")
            if not np.all(np.isfinite(M)):
                issues.append("matrix: non-finite entries")
        elif kind == "vector":
            v = io.vector_from_json(d)
            if not np.any(v):
                issues.append("vector: all entries are zero")
        else:
            issues.append("unrecognized document")
    except (InputError, KeyError, TypeError, ValueError) as exc:
        issues.append(f"{kind}: {exc}")
    return issues


def cmd_validate(args) -> int:
    any_issue = False
    for path in args.files:
        try:
            issues = validate_document(io.load_json(path), args.purpose)
        except InputError as exc:
            issues = [str(exc)]
        for msg in issues:
            print(f"{path}: {msg}")
        if not issues:
            print(f"{path}: ok")
        any_issue |= bool(issues)
    return EXIT_INPUT if (any_issue and args.strict) else EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsci", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demo", help="reproduce a demonstration")
    d.add_argument("name", choices=DEMOS)
    d.add_argument("--seed", type=int, default=None, help=f"sampling seed (default ${SEED_ENV} or 0)")
    d.add_argument("--shots", type=int, default=None)
    d.add_argument("--workers", type=int, default=1)
    d.add_argument("--qubits", type=int, default=None, help="grover: register width")
    d.add_argument("--marked", type=int, default=None, help="grover: marked index")
    d.add_argument("--eps", type=float, default=1e-6, help="qlsa-figure: series precision")
    d.add_argument("--phases", default=None, help="qlsa-figure: use this phase file (QSP route)")
    d.add_argument("-o", "--out", default=None)
    d.add_argument("--csv", action="store_true")
    d.set_defaults(func=cmd_demo)

    s = sub.add_parser("solve", help="run a solver route")
    s.add_argument("route", choices=ROUTES)
    s.add_argument("--matrix", default=None)
    s.add_argument("--rhs", default=None)
    s.add_argument("--kappa", type=float, default=None)
    s.add_argument("--eps", type=float, default=1e-6)
    s.add_argument("--alpha", type=float, default=None, help="spectral-norm bound")
    s.add_argument("--phases", default=None)
    s.add_argument("--m-bits", type=int, default=4)
    s.add_argument("--C", type=float, default=None)
    s.add_argument("--t0", type=float, default=None)
    s.add_argument("--spec", default=None, help="ode: problem file")
    s.add_argument("--n", type=int, default=None, help="poisson/wave: grid points")
    s.add_argument("--d", type=int, default=1, help="poisson: spatial dimension")
    s.add_argument("--t", type=float, default=1.0, help="wave: evolution time")
    s.add_argument("--h", type=float, default=1.0, help="wave: grid spacing")
    s.add_argument("--tol", type=float, default=None, help="exit 4 if the classical check exceeds this")
    s.add_argument("--check-kappa", action="store_true")
    s.add_argument("-o", "--out", default=None)
    s.add_argument("--csv", action="store_true")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("validate", help="check input files")
    v.add_argument("files", nargs="+")
    v.add_argument("--for", dest="purpose", default=None,
                   choices=("hhl", "qlsa-cheb", "qlsa-qsp", "qlsa-pd", "hamiltonian"))
    v.add_argument("--strict", action="store_true", help="exit 2 when any diagnostic is reported")
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = default_seed()
        return args.func(args)
    except PostselectionError as exc:
        print(f"postselection failed: {exc}", file=sys.stderr)
        return EXIT_POSTSELECT
    except ToleranceError as exc:
        print(f"tolerance not met: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (InputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
