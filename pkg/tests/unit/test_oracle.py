"""
Unit tests for the counted entropy oracle and the information quantities.
"""

from fractions import Fraction

import pytest

from fairrate.coalition import Coalition
from fairrate.errors import EnumerationLimitError, ModelError
from fairrate.metrics import OracleLedger
from fairrate.model import BitSourceModel
from fairrate.oracle import (
    DEFAULT_PHASE,
    EntropyOracle,
    conditional_entropy,
    dual_entropy,
    entropy,
    mutual_information,
    verify_polymatroid,
)


def C(*labels, players=3):
    return Coalition.from_labels(labels, players)


class TestEntropyOracle:
    def test_evaluate_counts_calls(self, overlapping_oracle):
        assert overlapping_oracle(C(1, 2, 3)) == Fraction(24, 5)
        assert overlapping_oracle.ledger.count(DEFAULT_PHASE) == 1

    def test_memoized_repeats_count_once_per_phase(self, overlapping_oracle):
        with overlapping_oracle.phase("first"):
            overlapping_oracle.evaluate(C(1))
            overlapping_oracle.evaluate(C(1))
        with overlapping_oracle.phase("second"):
            overlapping_oracle.evaluate(C(1))
        ledger = overlapping_oracle.ledger
        assert ledger.count("first") == 1
        assert ledger.raw("first") == 2
        assert ledger.count("second") == 1

    def test_without_memoization_every_call_counts(self, overlapping_model):
        oracle = EntropyOracle(overlapping_model, memoize=False)
        with oracle.phase("direct"):
            oracle.evaluate(C(2))
            oracle.evaluate(C(2))
        assert oracle.ledger.count("direct") == 2
        assert oracle.memoize is False

    def test_phase_nesting_restores_outer_phase(self, overlapping_oracle):
        with overlapping_oracle.phase("outer"):
            with overlapping_oracle.phase("inner"):
                assert overlapping_oracle.current_phase == "inner"
            assert overlapping_oracle.current_phase == "outer"
        assert overlapping_oracle.current_phase is None

    def test_ensure_phase_reuses_open_phase(self, overlapping_oracle):
        with overlapping_oracle.phase("outer"):
            with overlapping_oracle.ensure_phase("inner"):
                overlapping_oracle.evaluate(C(3))
        assert overlapping_oracle.ledger.count("outer") == 1
        assert "inner" not in overlapping_oracle.ledger.phases
        with overlapping_oracle.ensure_phase("alone"):
            assert overlapping_oracle.current_phase == "alone"

    def test_shared_ledger(self, overlapping_model, independent_model):
        ledger = OracleLedger()
        EntropyOracle(overlapping_model, ledger=ledger).evaluate_mask(1)
        EntropyOracle(independent_model, ledger=ledger).evaluate_mask(1)
        assert ledger.count(DEFAULT_PHASE) == 2

    def test_mask_out_of_range(self, overlapping_oracle):
        with pytest.raises(ModelError) as excinfo:
            overlapping_oracle.evaluate_mask(8)
        assert excinfo.value.error_code == "PLAYER_OUT_OF_RANGE"

    def test_ground_mismatch(self, overlapping_oracle):
        with pytest.raises(ModelError) as excinfo:
            overlapping_oracle.evaluate(Coalition.full(2))
        assert excinfo.value.error_code == "GROUND_MISMATCH"

    def test_table(self, two_terminal_oracle):
        assert two_terminal_oracle.table() == [0, 4, 6, 7]
        assert two_terminal_oracle.ledger.total() == 4

    def test_table_cap(self, overlapping_oracle):
        with pytest.raises(EnumerationLimitError):
            overlapping_oracle.table(max_players=2)
        assert len(overlapping_oracle.table(max_players=2, force=True)) == 8

    def test_restricted_oracle_shares_memo(self, overlapping_oracle):
        with overlapping_oracle.phase("shared"):
            overlapping_oracle.evaluate(C(2, 3))
            sub = overlapping_oracle.restrict(C(2, 3))
            assert sub.global_index == (1, 2)
            assert sub.evaluate_mask(0b11) == Fraction(19, 5)
            assert sub.evaluate_mask(0b10) == Fraction(5, 2)
        assert overlapping_oracle.ledger.count("shared") == 2
        assert overlapping_oracle.ledger.raw("shared") == 3
        assert sub.ledger is overlapping_oracle.ledger

    def test_repr(self, overlapping_oracle):
        assert repr(overlapping_oracle) == "EntropyOracle(players=3, memoize=True, phase=None)"


class TestInformationQuantities:
    def test_entropy(self, overlapping_oracle):
        assert entropy(overlapping_oracle, C(2, 3)) == Fraction(19, 5)

    def test_conditional_entropy(self, overlapping_oracle):
        assert conditional_entropy(overlapping_oracle, C(1), C(2, 3)) == 1
        assert conditional_entropy(overlapping_oracle, C(1, 2), C(3)) == Fraction(23, 10)

    @pytest.mark.parametrize(
        "labels, bound",
        [
            ((1,), 1),
            ((2,), 0),
            ((3,), 0),
            ((1, 2), Fraction(23, 10)),
            ((1, 3), 3),
            ((2, 3), Fraction(1, 2)),
            ((1, 2, 3), Fraction(24, 5)),
        ],
    )
    def test_every_slepian_wolf_bound(self, overlapping_oracle, labels, bound):
        coalition = C(*labels)
        assert conditional_entropy(overlapping_oracle, coalition, coalition.complement()) == bound

    def test_mutual_information(self, overlapping_oracle, independent_oracle):
        assert mutual_information(overlapping_oracle, C(2), C(3)) == Fraction(1, 2)
        assert mutual_information(independent_oracle, C(1), C(2)) == 0

    def test_dual_entropy(self, overlapping_oracle, two_terminal_oracle):
        assert dual_entropy(overlapping_oracle, C(2, 3)) == Fraction(1, 2)
        assert dual_entropy(two_terminal_oracle, C(1, players=2)) == 1
        assert dual_entropy(overlapping_oracle, C(1, 2, 3)) == Fraction(24, 5)
        assert dual_entropy(overlapping_oracle, C()) == 0


class TestVerifyPolymatroid:
    def test_coverage_model_passes(self, overlapping_model):
        report = verify_polymatroid(overlapping_model)
        assert report.is_polymatroid
        assert bool(report)
        assert report.witness is None
        assert report.oracle_calls == 8

    def test_negative_weight_breaks_monotonicity(self):
        model = BitSourceModel.build({"a": 1, "x": -2}, {1: ["a"], 2: ["x"]}, allow_negative=True)
        report = verify_polymatroid(model)
        assert not report.monotone
        assert report.failure == "monotonicity"
        left, right = report.witness
        assert left.labels() == ()
        assert right.labels() == (2,)

    def test_negative_shared_bit_breaks_submodularity(self):
        # The negative shared bit lowers both singletons but the pair only once.
        model = BitSourceModel.build(
            {"a": 3, "b": 3, "s": -1},
            {1: ["a", "s"], 2: ["b", "s"]},
            allow_negative=True,
        )
        report = verify_polymatroid(model)
        assert report.monotone
        assert not report.submodular
        assert report.failure == "submodularity"
        assert [c.labels() for c in report.witness] == [(1,), (2,)]

    def test_cap(self, overlapping_model):
        with pytest.raises(EnumerationLimitError):
            verify_polymatroid(overlapping_model, max_players=2)
