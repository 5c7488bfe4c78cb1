"""Truncated Fock-space engine for multipath parametric circuits.

The basis is the set of occupation vectors over all signal and idler paths
whose *total* photon number does not exceed a global cap.  Every circuit
element conserves the difference between total signal and total idler
photon number, so the engine can optionally restrict the basis to a single
difference sector, which keeps brute-force evolution affordable.

Generators are assembled as sparse anti-Hermitian matrices in the truncated
basis and exponentiated by scaling-and-squaring (`scipy.linalg.expm` for
dense work, `scipy.sparse.linalg.expm_multiply` when only the action on a
few columns is needed).  Truncation is validated, never assumed: callers
get a measured norm defect and a hard error once it crosses the configured
leak tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm, logm
from scipy.sparse.linalg import expm_multiply

from .errors import DimensionOverflowError, TruncationLeakError

#: largest basis the package will materialise before declaring the instance
#: out of desk scale.
DEFAULT_DIM_LIMIT = 4_000_000

#: largest basis for which a dense operator matrix is built.
DENSE_OPERATOR_LIMIT = 3_000

#: default tolerance on the measured norm defect of evolved columns.
DEFAULT_LEAK_TOL = 1e-3


@dataclass(frozen=True)
class OccupationVector:
    """Photon counts on every signal path and every idler path."""

    s_counts: tuple[int, ...]
    i_counts: tuple[int, ...]

    def __post_init__(self) -> None:
        for counts in (self.s_counts, self.i_counts):
            if counts and min(counts) < 0:
                raise ValueError(f"occupation counts must be nonnegative, got {counts}")

    @property
    def total_s(self) -> int:
        return sum(self.s_counts)

    @property
    def total_i(self) -> int:
        return sum(self.i_counts)

    @property
    def total(self) -> int:
        return self.total_s + self.total_i

    @property
    def difference(self) -> int:
        """Conserved signal-minus-idler photon number."""
        return self.total_s - self.total_i

    def key(self) -> tuple[int, ...]:
        """Concatenated counts, signal paths first."""
        return self.s_counts + self.i_counts


def as_occupation(value, n_s_paths: int, n_i_paths: int) -> OccupationVector:
    """Coerce ``value`` (OccupationVector or pair of sequences) and check path counts."""
    if isinstance(value, OccupationVector):
        occ = value
    else:
        s_counts, i_counts = value
        occ = OccupationVector(tuple(int(n) for n in s_counts), tuple(int(n) for n in i_counts))
    if len(occ.s_counts) != n_s_paths or len(occ.i_counts) != n_i_paths:
        raise ValueError(
            f"occupation has {len(occ.s_counts)}+{len(occ.i_counts)} paths, "
            f"expected {n_s_paths}+{n_i_paths}"
        )
    return occ


def _compositions(n_modes: int, cap: int) -> Iterator[tuple[int, ...]]:
    """All occupation tuples with total <= cap, in lexicographic order."""
    if n_modes == 0:
        yield ()
        return
    for head in range(cap + 1):
        for tail in _compositions(n_modes - 1, cap - head):
            yield (head,) + tail


def occupations_upto(n_modes: int, budget: int) -> list[tuple[int, ...]]:
    """Occupation tuples on ``n_modes`` modes with total <= budget (lexicographic)."""
    return list(_compositions(n_modes, budget))


def _exact_compositions(n_modes: int, total: int) -> Iterator[tuple[int, ...]]:
    if n_modes == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in _exact_compositions(n_modes - 1, total - head):
            yield (head,) + tail


def occupations_with_total(n_modes: int, total: int) -> list[tuple[int, ...]]:
    """Occupation tuples on ``n_modes`` modes with total == total (lexicographic)."""
    return list(_exact_compositions(n_modes, total))


def _sector_dimension(n_s: int, n_i: int, cap: int, delta: int | None) -> int:
    if delta is None:
        return math.comb(cap + n_s + n_i, n_s + n_i)
    dim = 0
    k_s = max(0, delta)
    while 2 * k_s - delta <= cap:
        k_i = k_s - delta
        dim += math.comb(k_s + n_s - 1, n_s - 1) * math.comb(k_i + n_i - 1, n_i - 1)
        k_s += 1
    return dim


class FockSpace:
    """Bijection between occupation vectors under a global photon cap and indices.

    Args:
        n_s_paths: number of signal paths.
        n_i_paths: number of idler paths.
        photon_cap: largest allowed total photon number (signal plus idler).
        delta: optional restriction to one conserved signal-minus-idler sector.
        dim_limit: hard bound on the basis size.

    Raises:
        DimensionOverflowError: the basis would exceed ``dim_limit``.
    """

    def __init__(
        self,
        n_s_paths: int,
        n_i_paths: int,
        photon_cap: int,
        delta: int | None = None,
        dim_limit: int = DEFAULT_DIM_LIMIT,
    ) -> None:
        if n_s_paths < 1 or n_i_paths < 1:
            raise ValueError("need at least one signal and one idler path")
        if photon_cap < 0:
            raise ValueError("photon cap must be nonnegative")
        expected = _sector_dimension(n_s_paths, n_i_paths, photon_cap, delta)
        if expected > dim_limit:
            raise DimensionOverflowError(
                f"basis of {expected} states exceeds the limit of {dim_limit}; "
                "lower the cap, restrict to a difference sector, or raise dim_limit"
            )
        self.n_s_paths = n_s_paths
        self.n_i_paths = n_i_paths
        self.photon_cap = photon_cap
        self.delta = delta
        n_modes = n_s_paths + n_i_paths
        if delta is None:
            keys = list(_compositions(n_modes, photon_cap))
        else:
            keys = []
            k_s = max(0, delta)
            while 2 * k_s - delta <= photon_cap:
                for s_occ in occupations_with_total(n_s_paths, k_s):
                    for i_occ in occupations_with_total(n_i_paths, k_s - delta):
                        keys.append(s_occ + i_occ)
                k_s += 1
            keys.sort()
        self._keys = keys
        self.states: tuple[OccupationVector, ...] = tuple(
            OccupationVector(key[:n_s_paths], key[n_s_paths:]) for key in keys
        )
        self._lookup = {key: j for j, key in enumerate(keys)}
        self.counts = np.asarray(keys, dtype=np.int64).reshape(len(keys), n_modes)
        self.totals = self.counts.sum(axis=1)
        self._hop_maps: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
        self._pair_maps: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
        assert len(self.states) == expected

    @property
    def dimension(self) -> int:
        return len(self.states)

    def __contains__(self, occ) -> bool:
        return as_occupation(occ, self.n_s_paths, self.n_i_paths).key() in self._lookup

    def index(self, occ) -> int:
        occ = as_occupation(occ, self.n_s_paths, self.n_i_paths)
        try:
            return self._lookup[occ.key()]
        except KeyError:
            raise ValueError(f"{occ} is not in this truncated basis") from None

    def basis_vector(self, occ) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.complex128)
        vec[self.index(occ)] = 1.0
        return vec

    def _hop_map(self, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
        """Index map for a+_a a_b with a != b: target index (-1 where n_b = 0)
        and matrix element sqrt(n_b (n_a + 1)) per source state."""
        cached = self._hop_maps.get((a, b))
        if cached is not None:
            return cached
        dim = self.dimension
        target = np.full(dim, -1, dtype=np.int64)
        src = np.nonzero(self.counts[:, b] > 0)[0]
        keys, lookup = self._keys, self._lookup
        for j in src.tolist():
            moved = list(keys[j])
            moved[b] -= 1
            moved[a] += 1
            target[j] = lookup[tuple(moved)]
        factor = np.zeros(dim)
        factor[src] = np.sqrt(
            self.counts[src, b] * (self.counts[src, a] + 1.0)
        )
        self._hop_maps[(a, b)] = (target, factor)
        return target, factor

    def _pair_raise_map(self, s_path: int, i_path: int) -> tuple[np.ndarray, np.ndarray]:
        """Index map for a+_s a+_i: target index (-1 above the cap) and
        matrix element sqrt((n_s + 1)(n_i + 1)) per source state."""
        cached = self._pair_maps.get((s_path, i_path))
        if cached is not None:
            return cached
        a, b = s_path, self.n_s_paths + i_path
        dim = self.dimension
        target = np.full(dim, -1, dtype=np.int64)
        src = np.nonzero(self.totals + 2 <= self.photon_cap)[0]
        keys, lookup = self._keys, self._lookup
        for j in src.tolist():
            raised = list(keys[j])
            raised[a] += 1
            raised[b] += 1
            target[j] = lookup[tuple(raised)]
        factor = np.zeros(dim)
        factor[src] = np.sqrt(
            (self.counts[src, a] + 1.0) * (self.counts[src, b] + 1.0)
        )
        self._pair_maps[(s_path, i_path)] = (target, factor)
        return target, factor


def enumerate_basis(
    n_s_paths: int,
    n_i_paths: int,
    photon_cap: int,
    delta: int | None = None,
    dim_limit: int = DEFAULT_DIM_LIMIT,
) -> FockSpace:
    """Build the truncated basis; see :class:`FockSpace`."""
    return FockSpace(n_s_paths, n_i_paths, photon_cap, delta=delta, dim_limit=dim_limit)


def auto_photon_cap(requested_photons: int, total_gain: float) -> int:
    """Default cap heuristic: requested photons plus a gain-dependent margin.

    Weight above the cap falls off roughly like tanh(gain)^margin for a
    single squeezer, so the margin targets a ~1e-8 tail at this gain.  This
    is a floor, not a guarantee: cascades can amplify intermediate states
    beyond what the summed gain suggests, so accuracy must be checked
    against the measured leak or a higher-cap rerun.
    """
    if total_gain <= 0:
        return max(12, requested_photons)
    decay = -math.log(math.tanh(total_gain)) if total_gain < 20.0 else 0.0
    margin = math.ceil(18.5 / max(decay, 0.35))
    return max(12, requested_photons + margin)


# ---------------------------------------------------------------------------
# sparse generators
# ---------------------------------------------------------------------------


def pdc_generator(space: FockSpace, s_path: int, i_path: int, r: float) -> sp.csr_matrix:
    """Anti-Hermitian generator r(a+_s a+_i - a_s a_i) in the truncated basis."""
    if not 0 <= s_path < space.n_s_paths:
        raise ValueError(f"signal path {s_path} out of range")
    if not 0 <= i_path < space.n_i_paths:
        raise ValueError(f"idler path {i_path} out of range")
    target, factor = space._pair_raise_map(s_path, i_path)
    src = np.nonzero(target >= 0)[0]
    dst = target[src]
    amp = (r * factor[src]).astype(np.complex128)
    rows = np.concatenate([dst, src])
    cols = np.concatenate([src, dst])
    vals = np.concatenate([amp, -amp])
    dim = space.dimension
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))


def number_generator(space: FockSpace, coeff: np.ndarray) -> sp.csr_matrix:
    """Generator sum_kj coeff[k, j] a+_k a_j over the concatenated path index.

    ``coeff`` is an (n_s+n_i) square matrix; entries that move photons
    between the signal and idler sides are rejected on sector-restricted
    spaces because they leave the sector.
    """
    n_modes = space.n_s_paths + space.n_i_paths
    coeff = np.asarray(coeff, dtype=np.complex128)
    if coeff.shape != (n_modes, n_modes):
        raise ValueError(f"coefficient matrix must be {n_modes}x{n_modes}")
    if space.delta is not None:
        mixing = np.abs(coeff[: space.n_s_paths, space.n_s_paths :]).max(initial=0.0) + np.abs(
            coeff[space.n_s_paths :, : space.n_s_paths]
        ).max(initial=0.0)
        if mixing > 0:
            raise ValueError("side-mixing generator is not closed on a difference sector")
    dim = space.dimension
    rows, cols, vals = [], [], []
    diag = np.diagonal(coeff)
    if np.any(diag):
        idx = np.arange(dim)
        rows.append(idx)
        cols.append(idx)
        vals.append(space.counts @ diag)
    for a in range(n_modes):
        for b in range(n_modes):
            if a == b or coeff[a, b] == 0:
                continue
            target, factor = space._hop_map(a, b)
            src = np.nonzero(target >= 0)[0]
            rows.append(target[src])
            cols.append(src)
            vals.append(coeff[a, b] * factor[src])
    if not rows:
        return sp.csr_matrix((dim, dim), dtype=np.complex128)
    return sp.csr_matrix(
        (
            np.concatenate(vals).astype(np.complex128),
            (np.concatenate(rows), np.concatenate(cols)),
        ),
        shape=(dim, dim),
    )


def _skew_log(unitary: np.ndarray) -> np.ndarray:
    gen = logm(np.asarray(unitary, dtype=np.complex128))
    return (gen - gen.conj().T) / 2


def _phase_diagonal(space: FockSpace, side: str, path: int, phase: float) -> np.ndarray:
    col = path if side == "s" else space.n_s_paths + path
    return np.exp(1j * phase * space.counts[:, col])


def _element_action(space: FockSpace, element):
    """Return ("diag", vector) or ("expm", sparse generator) for one element."""
    from . import ptr  # local import: ptr depends on scatter only

    n_s, n_i = space.n_s_paths, space.n_i_paths
    if isinstance(element, ptr.Pdc):
        return "expm", pdc_generator(space, element.s_path, element.i_path, element.r)
    if isinstance(element, ptr.PhaseS):
        return "diag", _phase_diagonal(space, "s", element.path, element.phase)
    if isinstance(element, ptr.PhaseI):
        return "diag", _phase_diagonal(space, "i", element.path, element.phase)
    if isinstance(element, ptr.LinearS):
        coeff = np.zeros((n_s + n_i, n_s + n_i), dtype=np.complex128)
        coeff[:n_s, :n_s] = _skew_log(element.matrix)
        return "expm", number_generator(space, coeff)
    if isinstance(element, ptr.LinearI):
        coeff = np.zeros((n_s + n_i, n_s + n_i), dtype=np.complex128)
        coeff[n_s:, n_s:] = _skew_log(element.matrix)
        return "expm", number_generator(space, coeff)
    raise TypeError(f"unknown circuit element {element!r}")


# ---------------------------------------------------------------------------
# evolution
# ---------------------------------------------------------------------------


def apply_circuit(
    circuit,
    space: FockSpace,
    block: np.ndarray,
    leak_tol: float | None = DEFAULT_LEAK_TOL,
) -> np.ndarray:
    """Apply the full nonlinear operator of ``circuit`` to a block of columns.

    Elements act in circuit order.  Each exponential is evaluated through
    `expm_multiply`, so only the requested columns are ever formed.

    Truncation is guarded two ways when ``leak_tol`` is set: the column
    norm defect (catches numerical breakdown; the truncated generators are
    anti-Hermitian, so exact arithmetic preserves norms) and, for circuits
    containing pair production, the final weight within two photons of the
    cap (an unconvergence flag: a cap that clips the state leaves order-one
    weight there, a converged one leaves only the exponential tail).  A
    defect above ``leak_tol`` raises :class:`TruncationLeakError`.  The
    guard is a necessary condition, not an error bound; quoted accuracies
    come from higher-cap reruns.
    """
    if circuit.n_s_paths != space.n_s_paths or circuit.n_i_paths != space.n_i_paths:
        raise ValueError("circuit and space disagree on path counts")
    block = np.asarray(block, dtype=np.complex128)
    squeeze = block.ndim == 1
    if squeeze:
        block = block[:, None]
    norms_in = np.linalg.norm(block, axis=0)
    for element in circuit.elements:
        kind, action = _element_action(space, element)
        if kind == "diag":
            block = action[:, None] * block
        else:
            block = expm_multiply(action, block)
    if leak_tol is not None:
        from . import ptr  # local import: ptr depends on scatter only

        norms_out = np.linalg.norm(block, axis=0)
        defect = float(np.max(np.abs(norms_out - norms_in) / np.maximum(norms_in, 1e-300)))
        if any(isinstance(element, ptr.Pdc) for element in circuit.elements):
            band = space.totals > space.photon_cap - 2
            if np.any(band):
                band_weight = np.sum(np.abs(block[band, :]) ** 2, axis=0)
                fractions = band_weight / np.maximum(norms_out**2, 1e-300)
                defect = max(defect, float(np.max(fractions)))
        if defect > leak_tol:
            raise TruncationLeakError(
                f"truncation leak estimate {defect:.3e} exceeds tolerance {leak_tol:.1e};"
                " raise the photon cap"
            )
    return block[:, 0] if squeeze else block


def nonlinear_operator(circuit, space: FockSpace) -> np.ndarray:
    """Dense matrix of the full nonlinear operator in the truncated basis.

    Intended for small spaces; raises DimensionOverflowError beyond
    `DENSE_OPERATOR_LIMIT` (use :func:`apply_circuit` instead there).
    """
    dim = space.dimension
    if dim > DENSE_OPERATOR_LIMIT:
        raise DimensionOverflowError(
            f"dense operator on {dim} states refused; apply_circuit scales further"
        )
    op = np.eye(dim, dtype=np.complex128)
    for element in circuit.elements:
        kind, action = _element_action(space, element)
        if kind == "diag":
            op = action[:, None] * op
        else:
            op = expm(action.toarray()) @ op
    return op


def linear_operator(matrix: np.ndarray, space: FockSpace) -> np.ndarray:
    """Dense Fock-space operator of a photon-number-conserving network.

    ``matrix`` scatters creation operators over the concatenated
    (signal, idler) path index and may mix the two sides; the operator
    fixes the vacuum, so no truncation leak occurs.
    """
    dim = space.dimension
    if dim > DENSE_OPERATOR_LIMIT:
        raise DimensionOverflowError(
            f"dense operator on {dim} states refused; use apply_linear instead"
        )
    return expm(number_generator(space, _skew_log(matrix)).toarray())


def apply_linear(matrix: np.ndarray, space: FockSpace, block: np.ndarray) -> np.ndarray:
    """Action of :func:`linear_operator` on a block of columns, kept sparse."""
    block = np.asarray(block, dtype=np.complex128)
    squeeze = block.ndim == 1
    if squeeze:
        block = block[:, None]
    out = expm_multiply(number_generator(space, _skew_log(matrix)), block)
    return out[:, 0] if squeeze else out


def column_norm_defect(block: np.ndarray) -> float:
    """Largest deviation of column norms from one."""
    block = np.asarray(block)
    if block.ndim == 1:
        block = block[:, None]
    return float(np.max(np.abs(np.linalg.norm(block, axis=0) - 1.0)))


# ---------------------------------------------------------------------------
# states and observables
# ---------------------------------------------------------------------------


def state_vector(space: FockSpace, amplitudes: Mapping, normalize: bool = False) -> np.ndarray:
    """Assemble a vector from occupation -> amplitude entries."""
    vec = np.zeros(space.dimension, dtype=np.complex128)
    for occ, amp in amplitudes.items():
        vec[space.index(occ)] = amp
    if normalize:
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        vec /= norm
    return vec


def product_state_vector(
    space: FockSpace,
    s_amplitudes: Mapping[tuple[int, ...], complex],
    i_amplitudes: Mapping[tuple[int, ...], complex],
    normalize: bool = True,
) -> np.ndarray:
    """Embed a product of a signal-side and an idler-side state.

    Components whose total photon number exceeds the cap are dropped, so the
    inputs should live far below it; ``normalize`` restores unit norm.
    """
    vec = np.zeros(space.dimension, dtype=np.complex128)
    for s_occ, a in s_amplitudes.items():
        for i_occ, b in i_amplitudes.items():
            j = space._lookup.get(tuple(s_occ) + tuple(i_occ))
            if j is not None:
                vec[j] += a * b
    if normalize:
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("product state has no support inside the cap")
        vec /= norm
    return vec


def joint_observable(
    space: FockSpace,
    obs_s: np.ndarray,
    s_basis: Sequence[tuple[int, ...]],
    obs_i: np.ndarray,
    i_basis: Sequence[tuple[int, ...]],
) -> sp.csr_matrix:
    """Embed O_s (x) O_i into the truncated joint basis.

    The observables are given as matrices over explicit occupation lists for
    each side; everything outside those lists is treated as zero, i.e. the
    embedded operator includes the projection onto the listed sectors.
    """
    obs_s = np.asarray(obs_s, dtype=np.complex128)
    obs_i = np.asarray(obs_i, dtype=np.complex128)
    if obs_s.shape != (len(s_basis), len(s_basis)) or obs_i.shape != (len(i_basis), len(i_basis)):
        raise ValueError("observable shape does not match its occupation list")
    s_keys = [tuple(occ) for occ in s_basis]
    i_keys = [tuple(occ) for occ in i_basis]
    rows, cols, vals = [], [], []
    for b_s, s_in in enumerate(s_keys):
        for b_i, i_in in enumerate(i_keys):
            col = space._lookup.get(s_in + i_in)
            if col is None:
                continue
            for a_s, s_out in enumerate(s_keys):
                for a_i, i_out in enumerate(i_keys):
                    val = obs_s[a_s, b_s] * obs_i[a_i, b_i]
                    if val == 0:
                        continue
                    row = space._lookup.get(s_out + i_out)
                    if row is None:
                        continue
                    rows.append(row)
                    cols.append(col)
                    vals.append(val)
    dim = space.dimension
    return sp.csr_matrix(
        (np.asarray(vals, dtype=np.complex128), (rows, cols)), shape=(dim, dim)
    )


def annihilation_matrix(space: FockSpace, side: str, path: int) -> sp.csr_matrix:
    """Sparse annihilation operator for one path of the truncated basis.

    Lowering leaves any difference sector, so this is only available on
    unrestricted spaces.
    """
    if space.delta is not None:
        raise ValueError("annihilation is not closed on a difference sector")
    if side not in ("s", "i"):
        raise ValueError("side must be 's' or 'i'")
    limit = space.n_s_paths if side == "s" else space.n_i_paths
    if not 0 <= path < limit:
        raise ValueError(f"path {path} out of range")
    col = path if side == "s" else space.n_s_paths + path
    rows, cols, vals = [], [], []
    lookup = space._lookup
    for j, key in enumerate(space._keys):
        n = key[col]
        if n == 0:
            continue
        lowered = list(key)
        lowered[col] -= 1
        rows.append(lookup[tuple(lowered)])
        cols.append(j)
        vals.append(math.sqrt(n))
    dim = space.dimension
    return sp.csr_matrix(
        (np.asarray(vals, dtype=np.complex128), (rows, cols)), shape=(dim, dim)
    )


def observable_expectation(
    circuit,
    space: FockSpace,
    state: np.ndarray,
    operator: sp.spmatrix | np.ndarray,
    leak_tol: float | None = DEFAULT_LEAK_TOL,
) -> complex:
    """<state| U+ (operator) U |state> with U the nonlinear circuit operator."""
    evolved = apply_circuit(circuit, space, state, leak_tol=leak_tol)
    return complex(np.vdot(evolved, operator @ evolved))


# ---------------------------------------------------------------------------
# closed-form single-device amplitudes
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _bs_amp(t: float, r: float, out_s: int, out_i: int, in_s: int, in_i: int) -> float:
    if in_i == 0:
        # seed: a two-output binomial expansion of the transmitted column
        return (
            math.sqrt(math.factorial(in_s) / (math.factorial(out_s) * math.factorial(out_i)))
            * t**out_s
            * (-r) ** out_i
        )
    total = 0.0
    if out_s > 0:
        total += math.sqrt(out_s / in_i) * r * _bs_amp(t, r, out_s - 1, out_i, in_s, in_i - 1)
    if out_i > 0:
        total += math.sqrt(out_i / in_i) * t * _bs_amp(t, r, out_s, out_i - 1, in_s, in_i - 1)
    return total


def bs_fock_amplitude(t: float, r: float, out_s: int, out_i: int, in_s: int, in_i: int) -> float:
    """<out_s, out_i| B |in_s, in_i> for the two-path beamsplitter.

    B maps a+_s -> t a+_s - r a+_i and a+_i -> r a+_s + t a+_i (reflection
    from signal to idler picks up the pi phase).  Evaluated by a recurrence
    that peels one idler input photon at a time, seeded by the binomial
    closed form of the idler-vacuum column; no matrix exponential involved.
    """
    for n in (out_s, out_i, in_s, in_i):
        if n < 0 or int(n) != n:
            raise ValueError("photon counts must be nonnegative integers")
    if out_s + out_i != in_s + in_i:
        return 0.0
    return _bs_amp(float(t), float(r), int(out_s), int(out_i), int(in_s), int(in_i))


def pdc_fock_amplitude(r: float, out_s: int, out_i: int, in_s: int, in_i: int) -> float:
    """<out_s, out_i| G |in_s, in_i> for one parametric pair source, gain r.

    Closed form: sech(r) times the beamsplitter amplitude with the idler
    input and output exchanged (the partial time reversal of the idler arm)
    and t = sech(r), reflectance tanh(r).  Zero unless the signal-minus-idler
    photon difference is conserved.
    """
    if out_s - out_i != in_s - in_i:
        return 0.0
    t = 1.0 / math.cosh(r)
    return t * bs_fock_amplitude(t, math.tanh(r), out_s, in_i, in_s, out_i)


def nonlinear_postselection_amplitude(
    circuit,
    input_occ,
    output_occ,
    photon_cap: int | None = None,
    leak_tol: float | None = DEFAULT_LEAK_TOL,
    dim_limit: int = DEFAULT_DIM_LIMIT,
) -> complex:
    """<output| U |input> by brute-force evolution in the truncated basis.

    Returns exactly zero when the conserved photon difference of input and
    output disagree.  The cap defaults to :func:`auto_photon_cap`; accuracy
    improves geometrically as the cap is raised above the occupations.
    """
    input_occ = as_occupation(input_occ, circuit.n_s_paths, circuit.n_i_paths)
    output_occ = as_occupation(output_occ, circuit.n_s_paths, circuit.n_i_paths)
    if input_occ.difference != output_occ.difference:
        return 0.0 + 0.0j
    if photon_cap is None:
        photon_cap = auto_photon_cap(max(input_occ.total, output_occ.total), circuit.total_gain)
    if photon_cap < max(input_occ.total, output_occ.total):
        raise ValueError("photon cap below the requested occupations")
    space = enumerate_basis(
        circuit.n_s_paths,
        circuit.n_i_paths,
        photon_cap,
        delta=input_occ.difference,
        dim_limit=dim_limit,
    )
    column = apply_circuit(circuit, space, space.basis_vector(input_occ), leak_tol=leak_tol)
    return complex(column[space.index(output_occ)])
