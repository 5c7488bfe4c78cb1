"""Basis enumeration, indexing, and shape bookkeeping."""

import math

import numpy as np
import pytest

from ptrsim import fock
from ptrsim.errors import DimensionOverflowError


def test_occupation_vector_shapes_and_totals():
    occ = fock.OccupationVector((2, 0), (1, 3))
    assert occ.total == 6
    assert occ.difference == 2 - 4
    assert occ.key() == (2, 0, 1, 3)


def test_occupation_vector_rejects_negative_counts():
    with pytest.raises(ValueError):
        fock.OccupationVector((1, -1), (0,))


def test_as_occupation_accepts_pairs_and_checks_width():
    occ = fock.as_occupation(((1, 0), (2,)), 2, 1)
    assert occ == fock.OccupationVector((1, 0), (2,))
    with pytest.raises(ValueError):
        fock.as_occupation(((1,), (2,)), 2, 1)


@pytest.mark.parametrize("n_modes,total", [(1, 0), (1, 5), (2, 3), (3, 4), (4, 2)])
def test_occupations_with_total_matches_stars_and_bars(n_modes, total):
    found = fock.occupations_with_total(n_modes, total)
    assert len(found) == math.comb(total + n_modes - 1, n_modes - 1)
    assert all(sum(occ) == total and len(occ) == n_modes for occ in found)
    assert len(set(found)) == len(found)


def test_occupations_upto_is_union_of_exact_totals():
    upto = set(fock.occupations_upto(2, 3))
    exact = set()
    for total in range(4):
        exact.update(fock.occupations_with_total(2, total))
    assert upto == exact


@pytest.mark.parametrize("n_s,n_i,cap", [(1, 1, 6), (2, 1, 5), (2, 2, 4)])
def test_full_space_dimension_is_binomial(n_s, n_i, cap):
    space = fock.FockSpace(n_s, n_i, cap)
    n_modes = n_s + n_i
    assert space.dimension == math.comb(cap + n_modes, n_modes)


@pytest.mark.parametrize("n_s,n_i,cap", [(1, 1, 6), (2, 2, 5), (3, 2, 4)])
def test_delta_sectors_partition_the_full_space(n_s, n_i, cap):
    full = fock.FockSpace(n_s, n_i, cap)
    sector_total = 0
    seen = set()
    for delta in range(-cap, cap + 1):
        sector = fock.FockSpace(n_s, n_i, cap, delta=delta)
        sector_total += sector.dimension
        for state in sector.states:
            assert state.difference == delta
            assert state.total <= cap
            seen.add(state.key())
    assert sector_total == full.dimension
    assert seen == {state.key() for state in full.states}


def test_index_round_trips_and_contains():
    space = fock.FockSpace(2, 1, 4, delta=1)
    for i, state in enumerate(space.states):
        assert space.index(state) == i
        assert state in space
    assert fock.OccupationVector((0, 0), (1,)) not in space  # delta = -1


def test_counts_and_totals_arrays_agree_with_states():
    space = fock.FockSpace(2, 2, 3)
    assert space.counts.shape == (space.dimension, 4)
    for i, state in enumerate(space.states):
        assert tuple(space.counts[i]) == state.key()
        assert space.totals[i] == state.total


def test_basis_vector_is_one_hot():
    space = fock.FockSpace(1, 1, 4, delta=0)
    occ = fock.OccupationVector((2,), (2,))
    column = space.basis_vector(occ)
    assert column[space.index(occ)] == 1.0
    assert np.count_nonzero(column) == 1


def test_negative_cap_rejected():
    with pytest.raises(ValueError):
        fock.FockSpace(1, 1, -1)


def test_dim_limit_overflow_raises():
    with pytest.raises(DimensionOverflowError):
        fock.FockSpace(3, 3, 60, dim_limit=10_000)


def test_auto_photon_cap_monotone_and_floored():
    assert fock.auto_photon_cap(0, 0.0) == 12
    caps = [fock.auto_photon_cap(4, g) for g in (0.1, 0.3, 0.6, 1.0, 2.0)]
    assert caps == sorted(caps)
    assert all(cap >= 12 for cap in caps)
    assert fock.auto_photon_cap(40, 0.0) == 40
