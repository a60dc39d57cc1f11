"""
Property checks across the region, greedy, decomposition and Shapley modules.

Instances come from the generator so every property is exercised on many
games with known planted blocks.
"""

from fractions import Fraction
from itertools import permutations, product

import numpy as np
import pytest

from fairrate.coalition import Partition
from fairrate.decomposition import direct_sum, finest_decomposer, is_decomposer, shapley_decomposed
from fairrate.generator import GenSpec, generate_decomposable, generate_indecomposable
from fairrate.oracle import EntropyOracle
from fairrate.polyhedron import check_core, check_dual_base, check_slepian_wolf, edmonds_greedy, enumerate_extreme_points
from fairrate.rates import RateVector
from fairrate.shapley import shapley_direct


def set_partitions(players):
    """Every partition of ``range(players)`` as lists of 0-based groups."""
    if players == 0:
        yield []
        return
    for rest in set_partitions(players - 1):
        newest = players - 1
        for index in range(len(rest)):
            yield rest[:index] + [rest[index] + [newest]] + rest[index + 1 :]
        yield rest + [[newest]]


def to_partition(groups, players):
    return Partition.from_labels([[p + 1 for p in group] for group in groups], players)


def perturbed_points(oracle, rng, count):
    """Extreme points and rational vectors near them, some on the sum-rate plane and some off it."""
    vertices = list(enumerate_extreme_points(EntropyOracle(oracle.model)))
    for k in range(count):
        base = vertices[int(rng.integers(len(vertices)))]
        if k % 5 == 0:
            yield base
            continue
        shift = [Fraction(int(step), 10) for step in rng.integers(-5, 6, size=len(base))]
        if k % 2 == 0:
            shift[-1] -= sum(shift)
        yield RateVector.of(rate + delta for rate, delta in zip(base, shift))


def assert_forms_agree(oracle, rng, count=1000):
    members = 0
    for rates in perturbed_points(oracle, rng, count):
        verdicts = {
            check_slepian_wolf(oracle, rates).is_member,
            check_core(oracle, rates).is_member,
            check_dual_base(oracle, rates).is_member,
        }
        assert len(verdicts) == 1, rates
        members += verdicts.pop()
    assert 0 < members < count


@pytest.mark.integration
class TestRegionForms:
    @pytest.mark.parametrize("players, seed", [(3, 0), (4, 1), (5, 2)])
    def test_three_forms_agree(self, players, seed):
        model = generate_decomposable(GenSpec(players=players, seed=seed, max_denominator=4)).model
        assert_forms_agree(EntropyOracle(model), np.random.default_rng(seed))

    @pytest.mark.parametrize(
        "oracle_fixture", ["overlapping_oracle", "independent_oracle", "decomposable_oracle", "two_terminal_oracle"]
    )
    def test_three_forms_agree_on_fixtures(self, request, oracle_fixture):
        assert_forms_agree(request.getfixturevalue(oracle_fixture), np.random.default_rng(17))

    def test_extreme_points_are_members(self):
        oracle = EntropyOracle(generate_indecomposable(GenSpec(players=4, seed=6)).model)
        for point in enumerate_extreme_points(oracle):
            assert check_slepian_wolf(oracle, point).is_member
            assert check_dual_base(oracle, point).is_member


@pytest.mark.integration
@pytest.mark.slow
class TestDecomposedShapley:
    def test_matches_direct_on_generated_games(self):
        for seed in range(200):
            players = 3 + seed % 10
            model = generate_decomposable(GenSpec(players=players, seed=seed)).model
            direct = shapley_direct(EntropyOracle(model))
            decomposed = shapley_decomposed(EntropyOracle(model))
            assert decomposed.value == direct.value, seed
            assert decomposed.value.total() == model.total_weight

            rng = np.random.default_rng(seed)
            for _ in range(10):
                perm = [int(p) for p in rng.permutation(players)]
                assert finest_decomposer(EntropyOracle(model), perm).finest == decomposed.decomposer.finest, (seed, perm)

    def test_matches_direct_on_indecomposable_games(self):
        for seed in range(5):
            model = generate_indecomposable(GenSpec(players=5, seed=seed)).model
            assert shapley_decomposed(EntropyOracle(model)).value == shapley_direct(EntropyOracle(model)).value


@pytest.mark.integration
class TestFinestDecomposer:
    @pytest.mark.parametrize("players, seed", [(4, 0), (5, 3), (6, 8)])
    def test_independent_of_the_permutation(self, players, seed):
        generated = generate_decomposable(GenSpec(players=players, seed=seed))
        for perm in permutations(range(players)):
            result = finest_decomposer(EntropyOracle(generated.model), perm)
            assert result.finest == generated.planted, perm

    @pytest.mark.parametrize("players, seed", [(4, 2), (5, 4)])
    def test_decomposers_are_exactly_the_coarsenings(self, players, seed):
        generated = generate_decomposable(GenSpec(players=players, seed=seed))
        oracle = EntropyOracle(generated.model)
        for groups in set_partitions(players):
            partition = to_partition(groups, players)
            assert is_decomposer(oracle, partition) == generated.planted.refines(partition), groups

    @pytest.mark.parametrize("players", range(2, 9))
    def test_call_count_is_at_most_quadratic(self, players):
        for seed in range(5):
            model = generate_decomposable(GenSpec(players=players, seed=seed)).model
            result = finest_decomposer(EntropyOracle(model))
            assert result.oracle_calls <= players ** 2
            assert result.raw_oracle_calls <= players ** 2

    @pytest.mark.parametrize("seed", range(4))
    def test_witness_is_the_greedy_vertex(self, seed):
        model = generate_decomposable(GenSpec(players=6, seed=seed)).model
        rng = np.random.default_rng(seed)
        for _ in range(10):
            perm = tuple(int(p) for p in rng.permutation(6))
            witness = finest_decomposer(EntropyOracle(model), perm).witness_extreme_point
            assert witness == edmonds_greedy(EntropyOracle(model), perm)


@pytest.mark.integration
class TestExtremePointProduct:
    @pytest.mark.parametrize("players, seed", [(4, 5), (5, 7), (6, 1)])
    def test_extreme_points_are_the_product_over_blocks(self, players, seed):
        generated = generate_decomposable(GenSpec(players=players, seed=seed, max_denominator=4))
        oracle = EntropyOracle(generated.model)
        blocks = list(generated.planted)
        per_block = [list(enumerate_extreme_points(oracle.restrict(block))) for block in blocks]

        combined = {direct_sum(list(zip(blocks, choice))) for choice in product(*per_block)}
        assert combined == set(enumerate_extreme_points(EntropyOracle(generated.model)))
