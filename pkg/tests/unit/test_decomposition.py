"""
Unit tests for decomposer detection and decomposed Shapley values.
"""

from fractions import Fraction

import pytest

from fairrate.coalition import Coalition, Partition
from fairrate.decomposition import (
    _DisjointSet,
    core_dimension,
    direct_sum,
    finest_decomposer,
    is_decomposer,
    partition_cost,
    restrict_model,
    shapley_decomposed,
)
from fairrate.errors import EnumerationLimitError, ModelError, PartitionError, PermutationError
from fairrate.model import BitSourceModel
from fairrate.oracle import EntropyOracle
from fairrate.polyhedron import check_core, edmonds_greedy
from fairrate.rates import RateVector
from fairrate.shapley import ShapleyMethod, shapley_direct


def C(*labels, players=3):
    return Coalition.from_labels(labels, players)


def rates(*values):
    return RateVector.of(values)


class TestRestrictModel:
    def test_subgame(self, decomposable_model):
        sub = restrict_model(decomposable_model, C(1, 3))
        assert sub.entropy_mask(0b01) == 2
        assert sub.entropy_mask(0b10) == Fraction(8, 5)
        assert sub.entropy_mask(0b11) == Fraction(13, 5)

    def test_empty(self, decomposable_model):
        with pytest.raises(ModelError):
            restrict_model(decomposable_model, C())


class TestIsDecomposer:
    def test_planted_partition(self, decomposable_oracle):
        assert is_decomposer(decomposable_oracle, Partition.from_labels([[1, 3], [2]], 3))
        assert partition_cost(decomposable_oracle, Partition.from_labels([[1, 3], [2]], 3)) == Fraction(18, 5)

    @pytest.mark.parametrize("groups", [[[1], [2], [3]], [[1, 2], [3]], [[1, 3], [2]], [[1], [2, 3]]])
    def test_indecomposable_example(self, overlapping_oracle, groups):
        assert not is_decomposer(overlapping_oracle, Partition.from_labels(groups, 3))

    def test_trivial_partition_always_decomposes(self, overlapping_oracle):
        assert is_decomposer(overlapping_oracle, Partition.trivial(3))

    def test_other_ground_set(self, overlapping_oracle):
        with pytest.raises(PartitionError):
            is_decomposer(overlapping_oracle, Partition.trivial(2))

    def test_cost_never_below_joint_entropy(self, overlapping_oracle):
        assert partition_cost(overlapping_oracle, Partition.singletons(3)) > Fraction(24, 5)


def test_disjoint_set_groups():
    sets = _DisjointSet(5)
    sets.union(0, 3)
    sets.union(3, 4)
    sets.union(4, 0)
    assert sorted(sets.groups()) == [0b00010, 0b00100, 0b11001]
    assert sets.find(4) == sets.find(0)


class TestFinestDecomposer:
    def test_decomposable_trace(self, decomposable_oracle):
        result = finest_decomposer(decomposable_oracle, (2, 1, 0))
        assert result.finest.labels() == [[1, 3], [2]]
        assert result.decomposable
        assert result.witness_extreme_point == rates(1, 1, "8/5")
        assert [s.labels() for s in result.intermediate_sets] == [(1, 3), (2,), (3,)]
        assert result.permutation == (2, 1, 0)

    def test_indecomposable_trace(self, overlapping_oracle):
        result = finest_decomposer(overlapping_oracle, (1, 2, 0))
        assert result.finest.labels() == [[1, 2, 3]]
        assert not result.decomposable
        assert result.witness_extreme_point == rates(1, "9/5", 2)
        assert [s.labels() for s in result.intermediate_sets] == [(1, 2, 3), (2,), (2, 3)]
        assert result.oracle_calls == 6
        assert result.raw_oracle_calls == 8

    @pytest.mark.parametrize("perm", [(0, 1, 2), (2, 0, 1), (1, 2, 0)])
    def test_independent_sources(self, independent_oracle, perm):
        result = finest_decomposer(independent_oracle, perm)
        assert result.finest == Partition.singletons(3)
        assert result.witness_extreme_point == rates(1, 1, 1)

    def test_default_permutation_is_identity(self, decomposable_oracle):
        assert finest_decomposer(decomposable_oracle).permutation == (0, 1, 2)

    def test_single_player(self):
        oracle = EntropyOracle(BitSourceModel.build({"a": 5}, {1: ["a"]}))
        result = finest_decomposer(oracle)
        assert result.finest == Partition.trivial(1)
        assert result.witness_extreme_point == rates(5)
        assert result.oracle_calls == 1

    def test_witness_is_the_greedy_vertex(self, overlapping_model):
        for perm in [(0, 1, 2), (2, 1, 0), (1, 0, 2)]:
            witness = finest_decomposer(EntropyOracle(overlapping_model), perm).witness_extreme_point
            assert witness == edmonds_greedy(EntropyOracle(overlapping_model), perm)
            assert check_core(EntropyOracle(overlapping_model), witness).is_member

    def test_call_count_is_quadratic(self, overlapping_oracle):
        assert finest_decomposer(overlapping_oracle).oracle_calls <= 3 * 3

    def test_malformed_permutation(self, overlapping_oracle):
        with pytest.raises(PermutationError):
            finest_decomposer(overlapping_oracle, (0, 1))

    def test_to_dict_is_one_based(self, decomposable_oracle):
        payload = finest_decomposer(decomposable_oracle, (2, 1, 0)).to_dict()
        assert payload["finest"] == [[1, 3], [2]]
        assert payload["decomposable"] is True
        assert payload["extreme_point"] == ["1", "1", "8/5"]
        assert payload["intermediate_sets"] == [[1, 3], [2], [3]]
        assert payload["permutation"] == [3, 2, 1]


class TestDirectSum:
    def test_places_coordinates(self):
        result = direct_sum(
            [(C(1, 3, players=6), rates(3, 7)), (C(2, 5, 6, players=6), rates(5, 2, 4))],
            require_cover=False,
        )
        assert result == rates(3, 5, 7, 2, 4)

    def test_single_part(self):
        assert direct_sum([(C(1, 2, 3), rates(1, 2, 3))]) == rates(1, 2, 3)

    def test_subgame_values(self):
        result = direct_sum([(C(1, 3), rates("3/2", "11/10")), (C(2), rates(1))])
        assert result == rates("3/2", 1, "11/10")

    def test_overlap(self):
        with pytest.raises(PartitionError) as excinfo:
            direct_sum([(C(1, 2), rates(1, 1)), (C(2, 3), rates(1, 1))])
        assert excinfo.value.error_code == "INVALID_DIRECT_SUM"

    def test_incomplete_cover(self):
        with pytest.raises(PartitionError, match="uncovered"):
            direct_sum([(C(1, 2), rates(1, 1))])

    def test_length_mismatch(self):
        with pytest.raises(PartitionError):
            direct_sum([(C(1, 2, 3), rates(1, 1))])

    def test_no_parts(self):
        with pytest.raises(PartitionError):
            direct_sum([])

    def test_mixed_ground_sets(self):
        with pytest.raises(PartitionError):
            direct_sum([(C(1, players=2), rates(1)), (C(2), rates(1))])


class TestShapleyDecomposed:
    @pytest.mark.parametrize(
        "fixture, expected",
        [
            ("decomposable_oracle", rates("3/2", 1, "11/10")),
            ("overlapping_oracle", rates("53/20", "9/10", "5/4")),
            ("independent_oracle", rates(1, 1, 1)),
        ],
    )
    def test_matches_direct(self, request, fixture, expected):
        oracle = request.getfixturevalue(fixture)
        result = shapley_decomposed(oracle)
        assert result.value == expected
        assert result.method is ShapleyMethod.DECOMPOSED
        assert result.value == shapley_direct(EntropyOracle(oracle.model)).value

    def test_counts_merge_the_search_and_subgames(self, overlapping_oracle):
        result = shapley_decomposed(overlapping_oracle)
        assert result.oracle_calls == 8
        assert result.raw_oracle_calls == 16
        assert result.decomposer.oracle_calls == 6
        assert result.oracle_calls <= result.raw_oracle_calls

    def test_parallel_matches_serial(self, decomposable_model):
        serial = shapley_decomposed(EntropyOracle(decomposable_model))
        parallel = shapley_decomposed(EntropyOracle(decomposable_model), parallel=True, n_jobs=2)
        assert serial.value == parallel.value
        assert serial.oracle_calls == parallel.oracle_calls

    def test_custom_permutation(self, decomposable_oracle):
        result = shapley_decomposed(decomposable_oracle, permutation=(2, 1, 0))
        assert result.decomposer.permutation == (2, 1, 0)
        assert result.value == rates("3/2", 1, "11/10")

    def test_sampled_subgames(self, decomposable_oracle):
        result = shapley_decomposed(decomposable_oracle, method="sampled", samples_factor=500, seed=3)
        assert result.value.distance_linf(rates("3/2", 1, "11/10")) <= Fraction(1, 10)
        # the singleton block is exact
        assert result.value[1] == 1
        assert result.sample_count == 500 * 4 + 500 * 1
        assert result.seed == 3
        assert result.rng_algorithm == "PCG64"

    def test_block_cap(self, overlapping_oracle):
        with pytest.raises(EnumerationLimitError):
            shapley_decomposed(overlapping_oracle, max_players=2)

    def test_block_cap_ignores_small_blocks(self, independent_oracle):
        assert shapley_decomposed(independent_oracle, max_players=1).value == rates(1, 1, 1)

    def test_unknown_method(self, overlapping_oracle):
        with pytest.raises(ValueError):
            shapley_decomposed(overlapping_oracle, method="magic")

    def test_to_dict_includes_decomposer(self, decomposable_oracle):
        payload = shapley_decomposed(decomposable_oracle).to_dict()
        assert payload["method"] == "decomposed"
        assert payload["decomposer"]["finest"] == [[1, 3], [2]]


class TestCoreDimension:
    @pytest.mark.parametrize(
        "fixture, expected",
        [("overlapping_oracle", 2), ("independent_oracle", 0), ("decomposable_oracle", 1), ("two_terminal_oracle", 1)],
    )
    def test_known_dimensions(self, request, fixture, expected):
        assert core_dimension(request.getfixturevalue(fixture)) == expected
