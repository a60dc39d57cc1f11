"""
Unit tests for coalitions, permutations and partitions.
"""

import pytest

from fairrate.coalition import (
    Coalition,
    Partition,
    identity_permutation,
    iter_coalitions,
    mask_members,
    permutation_from_labels,
    popcount,
    validate_permutation,
)
from fairrate.errors import ModelError, PartitionError, PermutationError


def test_bit_helpers():
    assert popcount(0) == 0
    assert popcount(0b1011) == 3
    assert mask_members(0b1011) == (0, 1, 3)
    assert mask_members(0) == ()


class TestCoalition:
    def test_labels_are_one_based(self):
        coalition = Coalition.from_labels([1, 3], 3)
        assert coalition.mask == 0b101
        assert coalition.members == (0, 2)
        assert coalition.labels() == (1, 3)
        assert str(coalition) == "{1,3}"

    def test_empty_and_full(self):
        assert Coalition.empty(4).is_empty()
        assert len(Coalition.empty(4)) == 0
        assert Coalition.full(4).is_full()
        assert Coalition.full(4).mask == 0b1111
        assert str(Coalition.empty(2)) == "{}"

    def test_set_algebra(self):
        a = Coalition.from_labels([1, 2], 4)
        b = Coalition.from_labels([2, 3], 4)
        assert (a | b).labels() == (1, 2, 3)
        assert (a & b).labels() == (2,)
        assert (a - b).labels() == (1,)
        assert a.complement().labels() == (3, 4)
        assert (a & b) <= a
        assert not a.issubset(b)
        assert a.isdisjoint(Coalition.from_labels([4], 4))

    def test_membership_and_iteration(self):
        coalition = Coalition.from_members([0, 2], 3)
        assert 2 in coalition
        assert 1 not in coalition
        assert 5 not in coalition
        assert "0" not in coalition
        assert list(coalition) == [0, 2]

    def test_add_and_remove_players(self):
        coalition = Coalition.from_members([0], 3)
        assert coalition.with_player(2).members == (0, 2)
        assert coalition.with_player(2).without_player(0).members == (2,)

    def test_members_outside_ground_set(self):
        with pytest.raises(ModelError) as excinfo:
            Coalition.from_labels([4], 3)
        assert excinfo.value.error_code == "PLAYER_OUT_OF_RANGE"
        with pytest.raises(ModelError):
            Coalition(0b1000, 3)

    @pytest.mark.parametrize("size", [0, 65])
    def test_ground_size_bounds(self, size):
        with pytest.raises(ModelError) as excinfo:
            Coalition(0, size)
        assert excinfo.value.error_code == "GROUND_SIZE"

    def test_sixty_four_players(self):
        full = Coalition.full(64)
        assert len(full) == 64
        assert 63 in full

    def test_different_ground_sets(self):
        with pytest.raises(ModelError) as excinfo:
            Coalition.full(2) | Coalition.full(3)
        assert excinfo.value.error_code == "GROUND_MISMATCH"

    def test_hashable(self):
        assert len({Coalition.from_labels([1], 2), Coalition.from_members([0], 2)}) == 1


def test_iter_coalitions_order():
    order = [c.labels() for c in iter_coalitions(3)]
    assert order == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]
    with_empty = list(iter_coalitions(2, include_empty=True))
    assert with_empty[0].is_empty()
    assert len(with_empty) == 4


class TestPermutations:
    def test_validate(self):
        assert validate_permutation([2, 0, 1], 3) == (2, 0, 1)
        assert identity_permutation(3) == (0, 1, 2)

    def test_from_labels(self):
        assert permutation_from_labels([3, 2, 1], 3) == (2, 1, 0)

    @pytest.mark.parametrize("perm", [[0, 0, 1], [0, 1], [1, 2, 3], []])
    def test_malformed(self, perm):
        with pytest.raises(PermutationError) as excinfo:
            validate_permutation(perm, 3)
        assert excinfo.value.error_code == "MALFORMED_PERMUTATION"


class TestPartition:
    def test_blocks_sorted_by_minimum_member(self):
        partition = Partition.from_labels([[2], [3, 1]], 3)
        assert partition.labels() == [[1, 3], [2]]
        assert str(partition) == "{{1,3}, {2}}"
        assert len(partition) == 2
        assert partition.largest_block_size == 2
        assert partition.ground_size == 3

    def test_trivial_and_singletons(self):
        assert Partition.trivial(3).labels() == [[1, 2, 3]]
        assert Partition.singletons(3).labels() == [[1], [2], [3]]

    def test_block_of(self):
        partition = Partition.from_labels([[1, 3], [2]], 3)
        assert partition.block_of(2).labels() == (1, 3)
        with pytest.raises(ModelError):
            partition.block_of(5)

    @pytest.mark.parametrize(
        "groups",
        [
            [[1, 2], [2, 3]],
            [[1], [2]],
            [[1, 2, 3], []],
        ],
    )
    def test_invalid(self, groups):
        with pytest.raises(PartitionError) as excinfo:
            Partition.from_labels(groups, 3)
        assert excinfo.value.error_code == "INVALID_PARTITION"

    def test_needs_a_block(self):
        with pytest.raises(PartitionError):
            Partition(())

    def test_refines(self):
        fine = Partition.singletons(3)
        coarse = Partition.from_labels([[1, 3], [2]], 3)
        assert fine.refines(coarse)
        assert coarse.refines(Partition.trivial(3))
        assert not coarse.refines(fine)

    def test_merge(self):
        partition = Partition.singletons(4)
        merged = partition.merge([[0, 2]])
        assert merged.labels() == [[1, 3], [2], [4]]
        assert partition.merge([[0, 1], [2, 3]]).labels() == [[1, 2], [3, 4]]

    def test_merge_rejects_reused_blocks(self):
        with pytest.raises(PartitionError):
            Partition.singletons(3).merge([[0, 1], [1, 2]])
