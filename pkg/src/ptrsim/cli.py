"""Command-line interface.

Circuits travel as JSON documents with complex numbers encoded as
``[re, im]`` pairs and matrices as row-major nested lists of such pairs.
Results go to stdout (human-readable by default, machine-readable with
``--json``); diagnostics go to stderr.  Exit codes: 0 pass, 1 residual
above tolerance, 2 usage or document error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import fock, gaussian, harness, linamp
from .errors import CircuitFormatError, PtrsimError
from .ptr import Circuit, LinearI, LinearS, Pdc, PhaseI, PhaseS, build_ptr

DEFAULT_TOL = 1e-8
DEFAULT_MAX_PHOTONS = 4
DEFAULT_SEED = 0

EXIT_PASS = 0
EXIT_RESIDUAL = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# circuit documents
# ---------------------------------------------------------------------------


def _expect_int(value, path: str, minimum: int = 0) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise CircuitFormatError(f"{path}: expected an integer >= {minimum}, got {value!r}")
    return value


def _expect_real(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise CircuitFormatError(f"{path}: expected a real number, got {value!r}")
    return float(value)


def _decode_complex(value, path: str) -> complex:
    if (
        not isinstance(value, (list, tuple))
        or len(value) != 2
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)
    ):
        raise CircuitFormatError(f"{path}: expected a [re, im] pair, got {value!r}")
    return complex(value[0], value[1])


def _decode_matrix(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise CircuitFormatError(f"{path}: expected a nonempty list of rows")
    width = None
    rows = []
    for j, row in enumerate(value):
        if not isinstance(row, list) or (width is not None and len(row) != width):
            raise CircuitFormatError(f"{path}[{j}]: ragged or non-list matrix row")
        width = len(row)
        rows.append([_decode_complex(entry, f"{path}[{j}][{k}]") for k, entry in enumerate(row)])
    matrix = np.asarray(rows, dtype=np.complex128)
    if matrix.shape[0] != matrix.shape[1]:
        raise CircuitFormatError(f"{path}: matrix must be square, got {matrix.shape}")
    return matrix


def _decode_element(entry, path: str, n_s: int, n_i: int):
    if not isinstance(entry, dict):
        raise CircuitFormatError(f"{path}: expected an object")
    tag = entry.get("type")
    known = {
        "pdc": {"type", "s", "i", "r"},
        "linear_s": {"type", "matrix"},
        "linear_i": {"type", "matrix"},
        "phase_s": {"type", "path", "phi"},
        "phase_i": {"type", "path", "phi"},
    }
    if tag not in known:
        raise CircuitFormatError(f"{path}.type: unknown element tag {tag!r}")
    extra = set(entry) - known[tag]
    if extra:
        raise CircuitFormatError(f"{path}: unexpected fields {sorted(extra)} for {tag!r}")
    try:
        if tag == "pdc":
            return Pdc(
                _expect_int(entry.get("s"), f"{path}.s"),
                _expect_int(entry.get("i"), f"{path}.i"),
                _expect_real(entry.get("r"), f"{path}.r"),
            )
        if tag == "linear_s":
            return LinearS(_decode_matrix(entry.get("matrix"), f"{path}.matrix"))
        if tag == "linear_i":
            return LinearI(_decode_matrix(entry.get("matrix"), f"{path}.matrix"))
        if tag == "phase_s":
            return PhaseS(
                _expect_int(entry.get("path"), f"{path}.path"),
                _expect_real(entry.get("phi"), f"{path}.phi"),
            )
        return PhaseI(
            _expect_int(entry.get("path"), f"{path}.path"),
            _expect_real(entry.get("phi"), f"{path}.phi"),
        )
    except ValueError as exc:
        raise CircuitFormatError(f"{path}: {exc}") from exc


def parse_circuit(document) -> Circuit:
    """Decode a circuit document, reporting the offending field on failure."""
    if not isinstance(document, dict):
        raise CircuitFormatError("document root must be an object")
    n_s = _expect_int(document.get("s_paths"), "s_paths", minimum=1)
    n_i = _expect_int(document.get("i_paths"), "i_paths", minimum=1)
    elements_doc = document.get("elements")
    if not isinstance(elements_doc, list):
        raise CircuitFormatError("elements: expected a list")
    extra = set(document) - {"s_paths", "i_paths", "elements"}
    if extra:
        raise CircuitFormatError(f"document: unexpected fields {sorted(extra)}")
    elements = tuple(
        _decode_element(entry, f"elements[{j}]", n_s, n_i)
        for j, entry in enumerate(elements_doc)
    )
    try:
        return Circuit(n_s, n_i, elements)
    except ValueError as exc:
        raise CircuitFormatError(str(exc)) from exc


def _encode_complex(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


def _encode_matrix(matrix: np.ndarray) -> list:
    return [[_encode_complex(entry) for entry in row] for row in np.asarray(matrix)]


def circuit_to_document(circuit: Circuit) -> dict:
    """Inverse of :func:`parse_circuit`; the round trip is lossless."""
    elements = []
    for element in circuit.elements:
        if isinstance(element, Pdc):
            elements.append({"type": "pdc", "s": element.s_path, "i": element.i_path, "r": element.r})
        elif isinstance(element, LinearS):
            elements.append({"type": "linear_s", "matrix": _encode_matrix(element.matrix)})
        elif isinstance(element, LinearI):
            elements.append({"type": "linear_i", "matrix": _encode_matrix(element.matrix)})
        elif isinstance(element, PhaseS):
            elements.append({"type": "phase_s", "path": element.path, "phi": element.phase})
        elif isinstance(element, PhaseI):
            elements.append({"type": "phase_i", "path": element.path, "phi": element.phase})
        else:
            raise TypeError(f"unknown circuit element {element!r}")
    return {"s_paths": circuit.n_s_paths, "i_paths": circuit.n_i_paths, "elements": elements}


def _load_circuit(path: str) -> Circuit:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except OSError as exc:
        raise CircuitFormatError(f"cannot read circuit file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CircuitFormatError(f"circuit file is not valid JSON: {exc}") from exc
    return parse_circuit(document)


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _parse_occupation(text: str, n_s: int, n_i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    try:
        s_part, i_part = text.split(";")
        s_counts = tuple(int(x) for x in s_part.split(","))
        i_counts = tuple(int(x) for x in i_part.split(","))
    except ValueError as exc:
        raise CircuitFormatError(
            f"occupation {text!r} must look like 's0,s1;i0,i1' with integer counts"
        ) from exc
    if len(s_counts) != n_s or len(i_counts) != n_i:
        raise CircuitFormatError(
            f"occupation {text!r} does not match the circuit's {n_s}+{n_i} paths"
        )
    if min(s_counts + i_counts) < 0:
        raise CircuitFormatError(f"occupation {text!r} has negative counts")
    return s_counts, i_counts


def _parse_complex_list(text: str, expected: int, what: str) -> np.ndarray:
    try:
        values = [complex(part.strip().replace("i", "j")) for part in text.split(",")]
    except ValueError as exc:
        raise CircuitFormatError(f"{what}: cannot parse complex list {text!r}") from exc
    if len(values) != expected:
        raise CircuitFormatError(f"{what}: expected {expected} entries, got {len(values)}")
    return np.asarray(values, dtype=np.complex128)


def _emit(payload: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def _matrix_lines(name: str, matrix: np.ndarray) -> list[str]:
    body = np.array2string(np.asarray(matrix), precision=12, suppress_small=False)
    return [f"{name}:"] + ["  " + line for line in body.splitlines()]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cmd_ptr(args) -> tuple[int, dict, list[str]]:
    circuit = _load_circuit(args.circuit)
    setup = build_ptr(circuit)
    scattering = setup.scattering
    payload = {
        "ss": _encode_matrix(scattering.ss),
        "si": _encode_matrix(scattering.si),
        "is": _encode_matrix(scattering.is_),
        "ii": _encode_matrix(scattering.ii),
        "nc": _encode_complex(setup.nc),
        "beta_factors": [_encode_complex(b) for b in setup.beta_factors],
        "gain_prefactor": setup.t_product,
    }
    lines = (
        _matrix_lines("ss", scattering.ss)
        + _matrix_lines("si", scattering.si)
        + _matrix_lines("is", scattering.is_)
        + _matrix_lines("ii", scattering.ii)
        + [
            f"nc: {setup.nc:.15g}",
            f"beta factors: {[format(b, '.15g') for b in setup.beta_factors]}",
            f"gain prefactor: {setup.t_product:.15g}",
        ]
    )
    return EXIT_PASS, payload, lines


def _cmd_amp(args) -> tuple[int, dict, list[str]]:
    circuit = _load_circuit(args.circuit)
    occ_in = _parse_occupation(args.input, circuit.n_s_paths, circuit.n_i_paths)
    occ_out = _parse_occupation(args.output, circuit.n_s_paths, circuit.n_i_paths)
    setup = build_ptr(circuit)
    dual = linamp.ptr_postselection_amplitude(setup, occ_in, occ_out)
    brute = fock.nonlinear_postselection_amplitude(circuit, occ_in, occ_out, photon_cap=args.cutoff)
    residual = abs(brute - dual) / max(abs(brute), abs(dual), 1e-300)
    payload = {
        "input": args.input,
        "output": args.output,
        "nonlinear_amplitude": _encode_complex(brute),
        "ptr_amplitude": _encode_complex(dual),
        "abs_residual": abs(brute - dual),
        "rel_residual": residual,
    }
    lines = [
        f"nonlinear amplitude: {brute:.15g}",
        f"ptr amplitude:       {dual:.15g}",
        f"relative residual:   {residual:.3e}",
    ]
    return (EXIT_PASS if residual <= args.tol else EXIT_RESIDUAL), payload, lines


def _cmd_verify(args) -> tuple[int, dict, list[str]]:
    circuit = _load_circuit(args.circuit)
    report = linamp.verify_duality(
        circuit,
        photon_budget=args.max_photons,
        photon_cap=args.cutoff,
        sample_count=args.samples,
        seed=args.seed,
        leak_tol=fock.DEFAULT_LEAK_TOL,
    )
    payload = {
        "photon_budget": report.photon_budget,
        "photon_cap": report.photon_cap,
        "pairs_checked": len(report.comparisons),
        "nc": _encode_complex(report.nc),
        "max_abs_residual": report.max_abs_residual,
        "max_rel_residual": report.max_rel_residual,
    }
    lines = [
        f"pairs checked: {len(report.comparisons)} (budget {report.photon_budget}, cap {report.photon_cap})",
        f"nc: {report.nc:.15g}",
        f"max abs residual: {report.max_abs_residual:.3e}",
        f"max rel residual: {report.max_rel_residual:.3e}",
    ]
    code = EXIT_PASS if report.max_rel_residual <= args.tol else EXIT_RESIDUAL
    return code, payload, lines


def _cmd_qfunc(args) -> tuple[int, dict, list[str]]:
    circuit = _load_circuit(args.circuit)
    n_s, n_i = circuit.n_s_paths, circuit.n_i_paths
    if args.alpha_s or args.alpha_i or args.beta_s or args.beta_i:
        missing = [
            name
            for name, value in (
                ("--alpha-s", args.alpha_s),
                ("--alpha-i", args.alpha_i),
                ("--beta-s", args.beta_s),
                ("--beta-i", args.beta_i),
            )
            if not value
        ]
        if missing:
            raise CircuitFormatError(f"explicit points need {' and '.join(missing)} as well")
        alpha_s = _parse_complex_list(args.alpha_s, n_s, "--alpha-s")
        alpha_i = _parse_complex_list(args.alpha_i, n_i, "--alpha-i")
        beta_s = _parse_complex_list(args.beta_s, n_s, "--beta-s")[np.newaxis, :]
        beta_i = _parse_complex_list(args.beta_i, n_i, "--beta-i")[np.newaxis, :]
        points = 1
    else:
        rng = np.random.default_rng(args.seed)
        points = args.points
        alpha_s = 0.5 * (rng.normal(size=n_s) + 1j * rng.normal(size=n_s))
        alpha_i = 0.5 * (rng.normal(size=n_i) + 1j * rng.normal(size=n_i))
        beta_s = 0.6 * (rng.normal(size=(points, n_s)) + 1j * rng.normal(size=(points, n_s)))
        beta_i = 0.6 * (rng.normal(size=(points, n_i)) + 1j * rng.normal(size=(points, n_i)))
    residual = gaussian.q_duality_residual(circuit, alpha_s, alpha_i, beta_s, beta_i)
    payload = {"points": points, "max_rel_residual": residual}
    lines = [f"points: {points}", f"max rel residual: {residual:.3e}"]
    return (EXIT_PASS if residual <= args.tol else EXIT_RESIDUAL), payload, lines


def _cmd_awp(args) -> tuple[int, dict, list[str]]:
    ratio = harness.four_photon_ratio(args.gain, seed=args.seed)
    circuit = harness._awp_scenario_circuit(args.gain, args.seed)
    nc = build_ptr(circuit).nc
    identity_residual = abs(ratio / nc - 1.0)
    payload = {
        "gain": args.gain,
        "classical_ratio": _encode_complex(ratio),
        "classical_ratio_deviation": abs(ratio - 1.0),
        "identity_residual": identity_residual,
    }
    lines = [
        f"four-photon ratio (classical bookkeeping): {ratio:.12g}",
        f"deviation from one: {abs(ratio - 1.0):.3e}  (vanishes as gain^2)",
        f"exact-identity residual: {identity_residual:.3e}",
    ]
    return (EXIT_PASS if identity_residual <= args.tol else EXIT_RESIDUAL), payload, lines


def _cmd_examples(args) -> tuple[int, dict, list[str]]:
    reports = harness.run_reference_examples()
    payload = {"reports": [rep.as_dict() for rep in reports]}
    lines = [rep.summary() for rep in reports]
    code = EXIT_PASS if all(rep.passed for rep in reports) else EXIT_RESIDUAL
    return code, payload, lines


def _cmd_teleport(args) -> tuple[int, dict, list[str]]:
    if args.ch or args.cv:
        if not (args.ch and args.cv):
            raise CircuitFormatError("give both --ch and --cv or neither")
        c_h = _parse_complex_list(args.ch, 1, "--ch")[0]
        c_v = _parse_complex_list(args.cv, 1, "--cv")[0]
    else:
        rng = np.random.default_rng(args.seed)
        raw = rng.normal(size=2) + 1j * rng.normal(size=2)
        c_h, c_v = raw / np.linalg.norm(raw)
    report = harness.teleportation_demo(args.gain, (c_h, c_v))
    payload = report.as_dict()
    lines = [report.summary()] + [
        f"  {key}: {value:.3e}" for key, value in report.residuals.items()
    ]
    return (EXIT_PASS if report.passed else EXIT_RESIDUAL), payload, lines


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptrsim",
        description="Duality checks between nonlinear optical circuits and their time-reversed linear networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, circuit=True):
        if circuit:
            p.add_argument("--circuit", required=True, help="circuit document (JSON)")
        p.add_argument("--cutoff", type=int, default=None, help="total photon cap (default: auto)")
        p.add_argument("--max-photons", type=int, default=DEFAULT_MAX_PHOTONS, help="photon budget per side")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="pass/fail tolerance")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("ptr", help="print the time-reversed network, nc, and cavity factors")
    common(p)
    p = sub.add_parser("amp", help="compare one postselection amplitude across both arms")
    common(p)
    p.add_argument("--input", required=True, help="input occupation 's0,s1;i0'")
    p.add_argument("--output", required=True, help="output occupation 's0,s1;i0'")
    p = sub.add_parser("verify", help="compare all amplitudes within a photon budget")
    common(p)
    p.add_argument("--samples", type=int, default=None, help="subsample this many pairs")
    p = sub.add_parser("qfunc", help="Q-function duality on coherent points")
    common(p)
    p.add_argument("--points", type=int, default=50, help="number of random probe points")
    p.add_argument("--alpha-s", default=None, help="input signal coherent amplitudes, comma separated")
    p.add_argument("--alpha-i", default=None, help="input idler coherent amplitudes")
    p.add_argument("--beta-s", default=None, help="probe signal coherent amplitudes")
    p.add_argument("--beta-i", default=None, help="probe idler coherent amplitudes")
    p = sub.add_parser("awp", help="four-photon coincidence ratio on the built-in two-crystal scene")
    common(p, circuit=False)
    p.add_argument("--gain", type=float, default=0.05, help="pair gain of both crystals")
    p = sub.add_parser("examples", help="run the closed-form reference scenarios")
    common(p, circuit=False)
    p = sub.add_parser("teleport", help="polarization teleportation demonstration")
    common(p, circuit=False)
    p.add_argument("--gain", type=float, default=0.05, help="pair gain of both crystals")
    p.add_argument("--ch", default=None, help="prepared H amplitude, e.g. '0.6'")
    p.add_argument("--cv", default=None, help="prepared V amplitude, e.g. '0.8j'")
    return parser


_COMMANDS = {
    "ptr": _cmd_ptr,
    "amp": _cmd_amp,
    "verify": _cmd_verify,
    "qfunc": _cmd_qfunc,
    "awp": _cmd_awp,
    "examples": _cmd_examples,
    "teleport": _cmd_teleport,
}


def dispatch(args: argparse.Namespace) -> int:
    """Run one parsed command; prints results, returns the exit code."""
    try:
        code, payload, lines = _COMMANDS[args.command](args)
    except CircuitFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PtrsimError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(payload, args.json, lines)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
