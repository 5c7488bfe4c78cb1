"""Circuit description and its linear partial-time-reversal setup.

A circuit is an ordered list of elements acting on a fixed set of signal
and idler paths: nondegenerate parametric pair sources (``Pdc``), linear
networks confined to one side, and single-path phase plates.  Substituting
every pair source by its hypothetical beamsplitter and folding the chain
with the Redheffer star product yields the scattering matrix of the dual
linear setup together with the normalization coefficient that relates
postselected amplitudes of the two pictures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import scatter
from .scatter import ScatteringMatrix, TransferMatrix

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class Pdc:
    """Nondegenerate parametric pair source coupling one signal and one idler path.

    The gain ``r`` is real and nonnegative; complex pump phases are expressed
    with explicit phase plates around the element.
    """

    s_path: int
    i_path: int
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("pair-source gain must be nonnegative")


@dataclass(frozen=True)
class LinearS:
    """Unitary linear network on the signal paths."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.array(self.matrix, dtype=np.complex128))
        defect = scatter.unitarity_defect(self.matrix)
        if defect > UNITARITY_TOL:
            raise ValueError(f"signal-side matrix is not unitary: defect {defect:.3e} exceeds 1e-10")


@dataclass(frozen=True)
class LinearI:
    """Unitary linear network on the idler paths."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.array(self.matrix, dtype=np.complex128))
        defect = scatter.unitarity_defect(self.matrix)
        if defect > UNITARITY_TOL:
            raise ValueError(f"idler-side matrix is not unitary: defect {defect:.3e} exceeds 1e-10")


@dataclass(frozen=True)
class PhaseS:
    """Phase plate on one signal path."""

    path: int
    phase: float


@dataclass(frozen=True)
class PhaseI:
    """Phase plate on one idler path."""

    path: int
    phase: float


Element = Union[Pdc, LinearS, LinearI, PhaseS, PhaseI]


@dataclass(frozen=True)
class Circuit:
    """Ordered multipath circuit; elements act first-to-last."""

    n_s_paths: int
    n_i_paths: int
    elements: tuple[Element, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.n_s_paths < 1 or self.n_i_paths < 1:
            raise ValueError("need at least one signal and one idler path")
        for pos, element in enumerate(self.elements):
            if isinstance(element, Pdc):
                if not 0 <= element.s_path < self.n_s_paths:
                    raise ValueError(f"element {pos}: signal path {element.s_path} out of range")
                if not 0 <= element.i_path < self.n_i_paths:
                    raise ValueError(f"element {pos}: idler path {element.i_path} out of range")
            elif isinstance(element, LinearS):
                if element.matrix.shape != (self.n_s_paths, self.n_s_paths):
                    raise ValueError(f"element {pos}: signal matrix shape mismatch")
            elif isinstance(element, LinearI):
                if element.matrix.shape != (self.n_i_paths, self.n_i_paths):
                    raise ValueError(f"element {pos}: idler matrix shape mismatch")
            elif isinstance(element, PhaseS):
                if not 0 <= element.path < self.n_s_paths:
                    raise ValueError(f"element {pos}: signal path {element.path} out of range")
            elif isinstance(element, PhaseI):
                if not 0 <= element.path < self.n_i_paths:
                    raise ValueError(f"element {pos}: idler path {element.path} out of range")
            else:
                raise TypeError(f"element {pos}: unknown element {element!r}")

    @property
    def total_gain(self) -> float:
        return sum(el.r for el in self.elements if isinstance(el, Pdc))

    @property
    def pdc_count(self) -> int:
        return sum(1 for el in self.elements if isinstance(el, Pdc))


def phase_matrix(path: int, phase: float, n_paths: int) -> np.ndarray:
    matrix = np.eye(n_paths, dtype=np.complex128)
    matrix[path, path] = np.exp(1j * phase)
    return matrix


@dataclass(frozen=True)
class PtrSetup:
    """Linear setup dual to a nonlinear circuit.

    ``nc`` is the normalization coefficient multiplying every dual
    amplitude; it factors into the product of the beamsplitter
    transmittances and one cavity determinant per pair source.
    """

    scattering: ScatteringMatrix
    nc: complex
    beta_factors: tuple[complex, ...]
    t_product: float


def _scattering_factors(circuit: Circuit) -> list[tuple[ScatteringMatrix, float | None]]:
    """Star-product factors of the substituted linear circuit, in fold order.

    Consecutive one-sided linear elements are merged into a single factor
    per run; each pair source becomes its hypothetical beamsplitter and is
    tagged with its gain (``None`` tags merged linear factors).  Zero-gain
    pair sources are dropped.
    """
    n_s, n_i = circuit.n_s_paths, circuit.n_i_paths
    factors: list[tuple[ScatteringMatrix, float | None]] = []
    pending_s = np.eye(n_s, dtype=np.complex128)
    pending_i = np.eye(n_i, dtype=np.complex128)
    dirty = False

    def flush():
        nonlocal pending_s, pending_i, dirty
        if dirty:
            factors.append(
                (
                    ScatteringMatrix(
                        pending_s,
                        np.zeros((n_s, n_i)),
                        np.zeros((n_i, n_s)),
                        pending_i.T,
                    ),
                    None,
                )
            )
            pending_s = np.eye(n_s, dtype=np.complex128)
            pending_i = np.eye(n_i, dtype=np.complex128)
            dirty = False

    for element in circuit.elements:
        if isinstance(element, Pdc):
            if element.r == 0:
                continue
            flush()
            factors.append(
                (scatter.hypothetical_bs(element.r, element.s_path, element.i_path, n_s, n_i), element.r)
            )
        elif isinstance(element, LinearS):
            pending_s = element.matrix @ pending_s
            dirty = True
        elif isinstance(element, LinearI):
            pending_i = element.matrix @ pending_i
            dirty = True
        elif isinstance(element, PhaseS):
            pending_s = phase_matrix(element.path, element.phase, n_s) @ pending_s
            dirty = True
        elif isinstance(element, PhaseI):
            pending_i = phase_matrix(element.path, element.phase, n_i) @ pending_i
            dirty = True
    flush()
    return factors


def substituted_factors(circuit: Circuit) -> list[ScatteringMatrix]:
    """Star-product factors of the substituted circuit, in fold order."""
    return [factor for factor, _ in _scattering_factors(circuit)]


def build_ptr(circuit: Circuit) -> PtrSetup:
    """Fold the substituted circuit into its dual setup and coefficient.

    The scattering matrix is the left-to-right star product of the factors
    of :func:`substituted_factors`.  Each pair source contributes sech(r)
    to the transmittance product and one cavity factor, evaluated as the
    inverse determinant of the feedback loop between the folded prefix and
    the incoming beamsplitter; for the leading pair source that determinant
    is one.
    """
    current = ScatteringMatrix.identity(circuit.n_s_paths, circuit.n_i_paths)
    t_product = 1.0
    betas: list[complex] = []
    for factor, gain in _scattering_factors(circuit):
        if gain is not None:
            loop = np.eye(circuit.n_s_paths, dtype=np.complex128) - current.si @ factor.is_
            betas.append(1.0 / complex(np.linalg.det(loop)))
            t_product *= 1.0 / math.cosh(gain)
        current = scatter.star(current, factor)
    nc = complex(t_product * np.prod(betas) if betas else t_product)
    return PtrSetup(current, nc, tuple(betas), t_product)


def circuit_transfer(circuit: Circuit) -> TransferMatrix:
    """Transfer matrix of the substituted circuit (product in reverse order)."""
    total = TransferMatrix.identity(circuit.n_s_paths, circuit.n_i_paths)
    n_s, n_i = circuit.n_s_paths, circuit.n_i_paths
    for element in circuit.elements:
        if isinstance(element, Pdc):
            if element.r == 0:
                continue
            step = scatter.bs_transfer(element.r, element.s_path, element.i_path, n_s, n_i)
        elif isinstance(element, LinearS):
            step = scatter.linear_transfer(element.matrix, "s", n_s, n_i)
        elif isinstance(element, LinearI):
            step = scatter.linear_transfer(element.matrix, "i", n_s, n_i)
        elif isinstance(element, PhaseS):
            step = scatter.linear_transfer(phase_matrix(element.path, element.phase, n_s), "s", n_s, n_i)
        else:
            step = scatter.linear_transfer(phase_matrix(element.path, element.phase, n_i), "i", n_s, n_i)
        total = step @ total
    return total


def nc_determinant_defect(setup: PtrSetup, block: str = "ss") -> float:
    """| |nc| - |det of one diagonal block| | (zero in exact arithmetic).

    Both diagonal blocks work: the transfer matrix underlying the setup has
    unit-modulus determinant, which forces |det ss block| = |det ii block|.
    """
    if block == "ss":
        mat = setup.scattering.ss
    elif block == "ii":
        mat = setup.scattering.ii
    else:
        raise ValueError("block must be 'ss' or 'ii'")
    return float(abs(abs(setup.nc) - abs(np.linalg.det(mat))))


def looping_series_defect(loop_value: complex, terms: int = 60) -> float:
    """Defect of the geometric looping-photon expansion of one cavity factor.

    ``loop_value`` is the product of reflectance and the folded prefix's
    signal-to-idler entry for the coupled path pair; the cavity factor
    1/(1+loop_value) is compared against its truncated alternating series.
    """
    partial = sum((-loop_value) ** n for n in range(terms))
    return float(abs(partial - 1.0 / (1.0 + loop_value)))


# ---------------------------------------------------------------------------
# closed-form reference setups
# ---------------------------------------------------------------------------


def su11_circuit(r: float, phi_s: float, phi_i: float) -> Circuit:
    """Two equal-gain pair sources with one phase plate per arm in between."""
    return Circuit(
        1,
        1,
        (
            Pdc(0, 0, r),
            PhaseS(0, phi_s),
            PhaseI(0, phi_i),
            Pdc(0, 0, r),
        ),
    )


def su11_expected(r: float, phi_s: float, phi_i: float) -> tuple[np.ndarray, complex]:
    """Closed-form dual matrix and coefficient of :func:`su11_circuit`."""
    t = 1.0 / math.cosh(r)
    refl = math.tanh(r)
    phi = phi_s + phi_i
    beta = 1.0 / (1.0 + refl**2 * np.exp(1j * phi))
    cross = 2.0 * beta * refl * math.cos(phi / 2.0) * np.exp(1j * phi / 2.0)
    matrix = np.array(
        [
            [beta * t**2 * np.exp(1j * phi_s), cross],
            [-cross, beta * t**2 * np.exp(1j * phi_i)],
        ]
    )
    return matrix, complex(beta * t**2)


def special_cancellation_circuit(r1: float, r2: float) -> Circuit:
    """Three pair sources on two signal paths tuned to empty the first one.

    The middle gain is fixed by cosh(r) tanh(r2) = tanh(r1), which requires
    r1 > r2 > 0; a pi plate after the first source sets up the destructive
    interference that decouples signal path 0 from the idler.
    """
    if not r1 > r2 > 0:
        raise ValueError("cancellation needs r1 > r2 > 0")
    r_mid = math.acosh(math.tanh(r1) / math.tanh(r2))
    return Circuit(
        2,
        1,
        (
            Pdc(0, 0, r1),
            PhaseS(0, math.pi),
            Pdc(1, 0, r_mid),
            Pdc(0, 0, r2),
        ),
    )


def special_cancellation_expected(r1: float, r2: float) -> tuple[np.ndarray, complex]:
    """Closed-form dual matrix (paths s0, s1, i) and coefficient."""
    r_mid = math.acosh(math.tanh(r1) / math.tanh(r2))
    t, refl = 1.0 / math.cosh(r_mid), math.tanh(r_mid)
    t1, refl1 = 1.0 / math.cosh(r1), math.tanh(r1)
    t2, refl2 = 1.0 / math.cosh(r2), math.tanh(r2)
    matrix = (
        np.array(
            [
                [-t1 * t2, refl * refl1 * t2, 0.0],
                [refl * refl2 * t1, t * t1**2, refl * t2],
                [-(refl**2) * refl1, -refl * t1, t * t1 * t2],
            ]
        )
        / t2**2
    )
    return matrix.astype(np.complex128), complex(t1 * t / t2)


def verify_special_cancellation(r1: float, r2: float) -> dict:
    """Compare the folded dual setup against its closed form.

    Returns the entrywise matrix defect, the coefficient defect, and the
    magnitude of the decoupled signal-to-idler entry.
    """
    setup = build_ptr(special_cancellation_circuit(r1, r2))
    expected_matrix, expected_nc = special_cancellation_expected(r1, r2)
    matrix_defect = float(np.abs(setup.scattering.full - expected_matrix).max())
    return {
        "matrix_defect": matrix_defect,
        "nc_defect": float(abs(setup.nc - expected_nc)),
        "decoupled_entry": float(abs(setup.scattering.si[0, 0])),
        "setup": setup,
    }
