"""Multiphoton amplitudes of linear networks and the duality verifier.

Postselected Fock amplitudes of a linear network are matrix permanents of
row/column-repeated submatrices.  The verifier pits those permanents,
scaled by the normalization coefficient of the dual setup, against
brute-force truncated Fock-space amplitudes of the nonlinear circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import fock, ptr
from .errors import DimensionOverflowError
from .fock import OccupationVector
from .ptr import Circuit, PtrSetup
from .scatter import ScatteringMatrix

MAX_PERMANENT_SIZE = 20


def _permanent_ryser(matrix: np.ndarray) -> complex:
    # Gray-code subset walk; row sums are updated by one column per step.
    n = matrix.shape[0]
    row_sums = np.zeros(n, dtype=np.complex128)
    total = 0.0 + 0.0j
    gray = 0
    sign = 1
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        changed = gray ^ new_gray
        col = changed.bit_length() - 1
        if new_gray & changed:
            row_sums += matrix[:, col]
        else:
            row_sums -= matrix[:, col]
        gray = new_gray
        sign = -sign  # parity of |S| alternates along the Gray walk
        total += sign * np.prod(row_sums)
    return complex(total if n % 2 == 0 else -total)


def _permanent_glynn(matrix: np.ndarray) -> complex:
    n = matrix.shape[0]
    if n == 1:
        return complex(matrix[0, 0])
    half = 1 << (n - 1)
    total = 0.0 + 0.0j
    chunk = 1 << 16
    for start in range(0, half, chunk):
        codes = np.arange(start, min(start + chunk, half), dtype=np.uint64)
        bits = (codes[None, :] >> np.arange(n - 1, dtype=np.uint64)[:, None]) & 1
        deltas = np.vstack([np.ones((1, codes.size)), 1.0 - 2.0 * bits]).astype(np.complex128)
        prods = np.prod(matrix.T @ deltas, axis=0)
        parities = 1.0 - 2.0 * (np.sum(bits, axis=0) % 2)
        total += np.sum(parities * prods)
    return complex(total / half)


def _permanent_naive(matrix: np.ndarray) -> complex:
    from itertools import permutations

    n = matrix.shape[0]
    if n > 9:
        raise DimensionOverflowError("naive permanent is an oracle for small sizes only")
    total = 0.0 + 0.0j
    for perm in permutations(range(n)):
        prod = 1.0 + 0.0j
        for row, col in enumerate(perm):
            prod *= matrix[row, col]
        total += prod
    return complex(total)


def permanent(matrix: np.ndarray, method: str = "ryser") -> complex:
    """Permanent of a square complex matrix.

    ``ryser`` (default) walks subsets in Gray-code order in O(2^n n);
    ``glynn`` is an independent route for cross-checks; ``naive`` is the
    O(n! n) definition, kept for oracle duty at small sizes.  Sizes above
    ``MAX_PERMANENT_SIZE`` are refused.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("permanent needs a square matrix")
    n = matrix.shape[0]
    if n > MAX_PERMANENT_SIZE:
        raise DimensionOverflowError(f"permanent of size {n} exceeds {MAX_PERMANENT_SIZE}")
    if n == 0:
        return 1.0 + 0.0j
    if method == "ryser":
        return _permanent_ryser(matrix)
    if method == "glynn":
        return _permanent_glynn(matrix)
    if method == "naive":
        return _permanent_naive(matrix)
    raise ValueError(f"unknown permanent method {method!r}")


def linear_fock_amplitude(matrix, input_occ, output_occ, method: str = "ryser") -> complex:
    """<output| L |input> for a photon-number-conserving linear network.

    ``matrix`` scatters creation operators over the concatenated
    (signal, idler) path index; occupations repeat its columns (input) and
    rows (output).  Zero when the total photon number changes.
    """
    if isinstance(matrix, ScatteringMatrix):
        n_s, n_i = matrix.n_s, matrix.n_i
        matrix = matrix.full
    else:
        matrix = np.asarray(matrix, dtype=np.complex128)
        n_s, n_i = matrix.shape[0], 0
    if n_i:
        input_occ = fock.as_occupation(input_occ, n_s, n_i)
        output_occ = fock.as_occupation(output_occ, n_s, n_i)
        in_counts = input_occ.key()
        out_counts = output_occ.key()
    else:
        if isinstance(input_occ, OccupationVector):
            input_occ = input_occ.key()
        if isinstance(output_occ, OccupationVector):
            output_occ = output_occ.key()
        in_counts = tuple(int(n) for n in input_occ)
        out_counts = tuple(int(n) for n in output_occ)
    if sum(in_counts) != sum(out_counts):
        return 0.0 + 0.0j
    cols = np.repeat(np.arange(matrix.shape[1]), in_counts)
    rows = np.repeat(np.arange(matrix.shape[0]), out_counts)
    sub = matrix[np.ix_(rows, cols)]
    norm = math.prod(math.factorial(n) for n in in_counts) * math.prod(
        math.factorial(n) for n in out_counts
    )
    return permanent(sub, method=method) / math.sqrt(norm)


def ptr_postselection_amplitude(setup: PtrSetup, input_occ, output_occ) -> complex:
    """Dual-picture prediction of <output| U |input> for the nonlinear circuit.

    The idler occupations swap roles between input and output (partial time
    reversal), the linear amplitude of the dual setup is taken there, and
    the normalization coefficient scales the result.  Fock states have real
    coefficients, so no conjugation appears.
    """
    n_s, n_i = setup.scattering.n_s, setup.scattering.n_i
    input_occ = fock.as_occupation(input_occ, n_s, n_i)
    output_occ = fock.as_occupation(output_occ, n_s, n_i)
    if input_occ.difference != output_occ.difference:
        return 0.0 + 0.0j
    swapped_in = OccupationVector(input_occ.s_counts, output_occ.i_counts)
    swapped_out = OccupationVector(output_occ.s_counts, input_occ.i_counts)
    return setup.nc * linear_fock_amplitude(setup.scattering, swapped_in, swapped_out)


@dataclass(frozen=True)
class AmplitudeComparison:
    """One brute-force versus dual-picture amplitude pair."""

    input: OccupationVector
    output: OccupationVector
    nonlinear: complex
    dual: complex
    abs_residual: float
    rel_residual: float


@dataclass(frozen=True)
class DualityReport:
    """Result of sweeping the duality over a photon budget."""

    photon_budget: int
    photon_cap: int
    nc: complex
    comparisons: tuple[AmplitudeComparison, ...]

    @property
    def max_abs_residual(self) -> float:
        return max((c.abs_residual for c in self.comparisons), default=0.0)

    @property
    def max_rel_residual(self) -> float:
        return max((c.rel_residual for c in self.comparisons), default=0.0)


def _occupations(n_s: int, n_i: int, budget: int) -> list[OccupationVector]:
    return [
        OccupationVector(counts[:n_s], counts[n_s:])
        for counts in fock.occupations_upto(n_s + n_i, budget)
    ]


def verify_duality(
    circuit: Circuit,
    photon_budget: int,
    photon_cap: int | None = None,
    sample_count: int | None = None,
    seed: int = 0,
    atol: float = 1e-12,
    leak_tol: float | None = None,
    dim_limit: int = fock.DEFAULT_DIM_LIMIT,
) -> DualityReport:
    """Compare brute force against the dual picture over occupation pairs.

    All conservation-allowed (input, output) pairs with at most
    ``photon_budget`` photons on each side are enumerated in lexicographic
    order; ``sample_count`` draws a seeded subsample without replacement
    (enumeration order is preserved).  The brute-force side batches all
    inputs of one difference sector into a single evolution.  Amplitude
    pairs whose magnitudes both fall below ``atol`` count as residual zero.

    The dual side involves no truncation, so any truncation damage on the
    brute side shows up directly in the reported residuals; the state-level
    leak guard is therefore off by default.  Pass ``leak_tol`` to fail fast
    on obviously undersized caps instead of reading it off the residuals.
    """
    if photon_budget < 0:
        raise ValueError("photon budget must be nonnegative")
    setup = ptr.build_ptr(circuit)
    n_s, n_i = circuit.n_s_paths, circuit.n_i_paths
    occupations = _occupations(n_s, n_i, photon_budget)
    pairs = [
        (occ_in, occ_out)
        for occ_in in occupations
        for occ_out in occupations
        if occ_in.difference == occ_out.difference
    ]
    if sample_count is not None and sample_count < len(pairs):
        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(len(pairs), size=sample_count, replace=False))
        pairs = [pairs[int(k)] for k in chosen]
    if photon_cap is None:
        photon_cap = fock.auto_photon_cap(photon_budget, circuit.total_gain)

    # one batched evolution per difference sector
    nonlinear: dict[tuple[OccupationVector, OccupationVector], complex] = {}
    deltas = sorted({occ_in.difference for occ_in, _ in pairs})
    for delta in deltas:
        sector_pairs = [(a, b) for a, b in pairs if a.difference == delta]
        sector_inputs = sorted({a for a, _ in sector_pairs}, key=OccupationVector.key)
        space = fock.enumerate_basis(n_s, n_i, photon_cap, delta=delta, dim_limit=dim_limit)
        block = np.zeros((space.dimension, len(sector_inputs)), dtype=np.complex128)
        col_of = {}
        for col, occ in enumerate(sector_inputs):
            block[space.index(occ), col] = 1.0
            col_of[occ] = col
        evolved = fock.apply_circuit(circuit, space, block, leak_tol=leak_tol)
        for occ_in, occ_out in sector_pairs:
            nonlinear[(occ_in, occ_out)] = complex(
                evolved[space.index(occ_out), col_of[occ_in]]
            )

    comparisons = []
    for occ_in, occ_out in pairs:
        brute = nonlinear[(occ_in, occ_out)]
        dual = ptr_postselection_amplitude(setup, occ_in, occ_out)
        abs_res = abs(brute - dual)
        denom = max(abs(brute), abs(dual))
        rel_res = 0.0 if denom < atol else abs_res / denom
        comparisons.append(
            AmplitudeComparison(occ_in, occ_out, brute, dual, abs_res, rel_res)
        )
    return DualityReport(photon_budget, photon_cap, setup.nc, tuple(comparisons))


def four_photon_awp_amplitude(setup, s_pair: Sequence[int], i_pair: Sequence[int]) -> complex:
    """Leading-order four-photon coincidence amplitude in the advanced-wave picture.

    ``s_pair`` and ``i_pair`` name the two signal and two idler detection
    paths (repeats allowed).  From the pumped vacuum, the amplitude is the
    permanent of the relevant 2x2 slice of the signal-to-idler coupling
    block with bosonic bunching factors, which reduces to three closed
    forms; the normalization coefficient is deliberately omitted, so at low
    gain the ratio against brute force approaches one like the gain squared.
    """
    matrix = setup.scattering if isinstance(setup, PtrSetup) else setup
    if not isinstance(matrix, ScatteringMatrix):
        raise TypeError("expected a PtrSetup or ScatteringMatrix")
    (k1, k2), (l1, l2) = tuple(s_pair), tuple(i_pair)
    coupling = matrix.si
    if k1 != k2 and l1 != l2:
        return complex(coupling[k1, l1] * coupling[k2, l2] + coupling[k2, l1] * coupling[k1, l2])
    if k1 == k2 and l1 != l2:
        return complex(math.sqrt(2.0) * coupling[k1, l1] * coupling[k1, l2])
    if k1 != k2 and l1 == l2:
        return complex(math.sqrt(2.0) * coupling[k1, l1] * coupling[k2, l1])
    return complex(coupling[k1, l1] ** 2)
