import math
from fractions import Fraction

import numpy as np
import pytest

from urnsim.colors import FiniteIdx, Hex, Lattice, Phased, hex_partition
from urnsim.errors import (
    BlockLeak,
    ColorOutOfSpace,
    InfiniteSupport,
    IrrationalWeights,
    NegativeWeight,
    NonStochasticRow,
    NotErgodic,
    ValidationError,
)
from urnsim.kernels import (
    HexWalk,
    LatticeWalk,
    PeriodicWalk,
    StableWalk,
    augment,
    block_diagonal,
    finite_matrix,
    kernel_from_json,
    kernel_step,
    kernel_to_json,
    point_mass,
    rational_row_support,
    row_support,
    stable_increments,
    stationary_distribution,
    validate_kernel,
)
from urnsim.rngutil import make_rng

FLIP = finite_matrix([[0, 1], [1, 0]])
SRW = LatticeWalk(1, {(-1,): 0.5, (1,): 0.5})


def test_validate_accepts_stochastic_rows():
    validate_kernel(FLIP)
    validate_kernel(SRW)
    validate_kernel(StableWalk(1.5))
    validate_kernel(HexWalk())
    validate_kernel(PeriodicWalk(2, [{(1, 0): 1.0}, {(0, 1): 1.0}]))


def test_validate_rejects_bad_rows():
    with pytest.raises(NonStochasticRow):
        validate_kernel(finite_matrix([[0.5, 0.4], [0.5, 0.5]]))
    with pytest.raises(NegativeWeight):
        validate_kernel(finite_matrix([[1.5, -0.5], [0.5, 0.5]]))
    with pytest.raises(ValidationError):
        validate_kernel(finite_matrix([[1.0], [0.5, 0.5]]))
    with pytest.raises(ValidationError):
        validate_kernel(StableWalk(2.5))
    with pytest.raises(ValidationError):
        validate_kernel(StableWalk(0.0))
    with pytest.raises(ValidationError):
        validate_kernel(LatticeWalk(2, {(1,): 1.0}))


def test_block_diagonal_structure():
    bd = block_diagonal([[[1.0]], [[0.5, 0.5], [0.5, 0.5]]])
    validate_kernel(bd)
    assert bd.m == 3
    assert bd.block_of(0) == 0
    assert bd.block_of(2) == 1
    assert bd.global_row(1) == ((1, 0.5), (2, 0.5))


def test_block_diagonal_leak_rejected():
    # full-width rows can place mass outside their own block
    leaky = block_diagonal(
        [[[0.5, 0.0, 0.5]], [[0.0, 0.5, 0.5], [0.0, 0.5, 0.5]]],
        block_offsets=[0, 1],
    )
    with pytest.raises(BlockLeak):
        validate_kernel(leaky)


def test_stationary_two_color_closed_form():
    p, q = 0.3, 0.2
    k = finite_matrix([[1 - p, p], [q, 1 - q]])
    pi = stationary_distribution(k)
    assert np.allclose(pi, [q / (p + q), p / (p + q)], atol=1e-12)


def test_stationary_rejects_periodic_and_reducible():
    with pytest.raises(NotErgodic):
        stationary_distribution(FLIP)  # period 2
    with pytest.raises(NotErgodic):
        stationary_distribution(finite_matrix([[1, 0], [0, 1]]))  # reducible


def test_kernel_step_space_checks():
    rng = make_rng(0)
    with pytest.raises(ColorOutOfSpace):
        kernel_step(FLIP, FiniteIdx(5), rng)
    with pytest.raises(ColorOutOfSpace):
        kernel_step(FLIP, Lattice((0,)), rng)
    with pytest.raises(ColorOutOfSpace):
        kernel_step(SRW, Lattice((0, 0)), rng)
    with pytest.raises(ColorOutOfSpace):
        kernel_step(HexWalk(), Hex(2, 0), rng)  # residue-2 point, not a vertex


def test_row_support_sums_to_one():
    for spec, color in (
        (FLIP, FiniteIdx(0)),
        (SRW, Lattice((3,))),
        (HexWalk(), Hex(0, 0)),
        (PeriodicWalk(2, [{(1,): 0.5, (-1,): 0.5}, {(2,): 1.0}]), Phased((0,), 1)),
    ):
        row = row_support(spec, color)
        assert abs(sum(w for _, w in row) - 1.0) < 1e-12
        assert all(w > 0 for _, w in row)


def test_row_support_infinite_for_stable():
    with pytest.raises(InfiniteSupport):
        row_support(StableWalk(1.5), Lattice((0,)))


def test_rational_row_support_exact():
    row = rational_row_support(FLIP, FiniteIdx(1))
    assert row == [(FiniteIdx(0), Fraction(1))]
    with pytest.raises(IrrationalWeights):
        rational_row_support(LatticeWalk(1, {(1,): 1 / 3, (-1,): 2 / 3}), Lattice((0,)))


def test_hex_steps_alternate_partition_classes():
    rng = make_rng(3)
    c = Hex(0, 0)
    for _ in range(50):
        nxt = kernel_step(HexWalk(), c, rng)
        assert hex_partition(nxt) != hex_partition(c)
        assert max(abs(nxt.a - c.a), abs(nxt.b - c.b)) <= 1
        c = nxt


def test_stable_increment_tail_law():
    # |Y| = ceil(U^(-1/alpha)) has P(|Y| > n) = n^(-alpha) exactly
    alpha = 1.5
    rng = make_rng(11)
    y = np.abs(stable_increments(alpha, 200_000, rng))
    assert np.all(y > 1)  # the n = 1 tail probability is exactly 1
    for n in (2, 3, 5):
        p = n ** (-alpha)
        phat = np.mean(y > n)
        se = math.sqrt(p * (1 - p) / y.size)
        assert abs(phat - p) < 4 * se


def test_stable_increment_symmetry():
    rng = make_rng(12)
    y = stable_increments(0.8, 200_000, rng)
    assert abs(np.mean(y > 0) - 0.5) < 0.005
    assert np.min(np.abs(y)) >= 1


def test_augment_checks_init_colors():
    with pytest.raises(ColorOutOfSpace):
        augment(FLIP, point_mass(FiniteIdx(9)))
    aug = augment(FLIP, point_mass(FiniteIdx(0)))
    rng = make_rng(0)
    from urnsim.kernels import DELTA

    assert aug.step(DELTA, rng) == FiniteIdx(0)
    assert aug.step(FiniteIdx(0), rng) == FiniteIdx(1)


@pytest.mark.parametrize(
    "kernel",
    [
        FLIP,
        block_diagonal([[[1.0]], [[0.5, 0.5], [0.5, 0.5]]]),
        SRW,
        StableWalk(1.5),
        PeriodicWalk(2, [{(1, 0): 1.0}, {(0, 1): 1.0}]),
        HexWalk(),
    ],
)
def test_kernel_json_round_trip(kernel):
    assert kernel_from_json(kernel_to_json(kernel)) == kernel
