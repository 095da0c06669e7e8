"""Unit tests for the validated probability types."""

import numpy as np
import pytest

from core.errors import DistributionError, LabError
from core.prob.distributions import Channel, DistortionMeasure, JointPmf, Pmf, SymbolSequence


class TestPmf:
    """Test Pmf validation and constructors."""

    def test_valid_pmf(self):
        p = Pmf([0.2, 0.3, 0.5])
        assert p.size == 3
        assert p.to_list() == [0.2, 0.3, 0.5]

    def test_within_tolerance_is_accepted_unchanged(self):
        p = Pmf([0.5, 0.5 + 5e-10])
        assert p.probs[1] == 0.5 + 5e-10

    def test_rejects_bad_sum(self):
        with pytest.raises(DistributionError, match="sums to"):
            Pmf([0.5, 0.49])

    def test_rejects_negative_entries(self):
        with pytest.raises(DistributionError, match="negative"):
            Pmf([1.2, -0.2])

    def test_rejects_empty_and_nan(self):
        with pytest.raises(DistributionError):
            Pmf([])
        with pytest.raises(DistributionError):
            Pmf([np.nan, 1.0])

    def test_distribution_error_is_value_error(self):
        with pytest.raises(ValueError):
            Pmf([0.9])

    def test_error_message_carries_troubleshooting(self):
        with pytest.raises(LabError) as exc_info:
            Pmf([0.5, 0.6])
        assert "| Troubleshooting:" in str(exc_info.value)
        assert "\n" not in str(exc_info.value)

    def test_constructors(self):
        assert Pmf.uniform(4).to_list() == [0.25] * 4
        assert Pmf.point_mass(3, 1).to_list() == [0.0, 1.0, 0.0]
        assert Pmf.bernoulli(0.3).probs[1] == pytest.approx(0.3)

    def test_immutable(self):
        p = Pmf([0.5, 0.5])
        with pytest.raises(ValueError):
            p.probs[0] = 1.0

    def test_input_array_is_copied(self):
        values = np.array([0.5, 0.5])
        p = Pmf(values)
        values[0] = 0.9
        assert p.probs[0] == 0.5


class TestJointPmf:
    """Test JointPmf validation and axis handling."""

    def test_axis_labels(self):
        joint = JointPmf(np.full((2, 3), 1 / 6), ("X", "Y"))
        assert joint.shape == (2, 3)
        assert joint.axis_index("Y") == 1
        assert joint.axis_index(-1) == 1

    def test_default_labels(self):
        joint = JointPmf(np.full((2, 2, 2), 0.125))
        assert joint.axes == ("A0", "A1", "A2")

    def test_rejects_vectors(self):
        with pytest.raises(DistributionError, match="at least two axes"):
            JointPmf(np.array([0.5, 0.5]))

    def test_rejects_label_mismatch(self):
        with pytest.raises(DistributionError):
            JointPmf(np.full((2, 2), 0.25), ("X",))
        with pytest.raises(DistributionError, match="distinct"):
            JointPmf(np.full((2, 2), 0.25), ("X", "X"))

    def test_unknown_axis(self):
        joint = JointPmf(np.full((2, 2), 0.25), ("X", "Y"))
        with pytest.raises(DistributionError, match="Unknown axis"):
            joint.axis_index("Z")
        with pytest.raises(DistributionError, match="out of range"):
            joint.axis_index(2)


class TestChannel:
    """Test Channel validation and constructors."""

    def test_bsc(self):
        ch = Channel.bsc(0.1)
        assert ch.input_size == 2 and ch.output_size == 2
        assert ch.rows[0, 1] == pytest.approx(0.1)

    def test_rejects_bad_row(self):
        with pytest.raises(DistributionError, match="row 1"):
            Channel([[0.5, 0.5], [0.7, 0.2]])

    def test_identity_and_constant(self):
        assert np.array_equal(Channel.identity(3).rows, np.eye(3))
        ch = Channel.constant(Pmf([0.25, 0.75]), 3)
        assert ch.input_size == 3
        assert ch.row(2).to_list() == [0.25, 0.75]


class TestDistortionMeasure:
    """Test DistortionMeasure validation."""

    def test_d_max_is_exact(self):
        d = DistortionMeasure([[0.0, 2.5], [1.0, 0.0]])
        assert d.d_max == 2.5

    def test_hamming(self):
        d = DistortionMeasure.hamming(2, 3)
        assert d.table.tolist() == [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0]]

    def test_rejects_negative(self):
        with pytest.raises(DistributionError):
            DistortionMeasure([[0.0, -1.0], [1.0, 0.0]])


class TestSymbolSequence:
    """Test SymbolSequence validation and equality."""

    def test_valid(self):
        seq = SymbolSequence([0, 1, 2], 3)
        assert seq.n == 3
        assert seq == SymbolSequence(np.array([0, 1, 2]), 3)
        assert hash(seq) == hash(SymbolSequence([0, 1, 2], 3))

    def test_rejects_out_of_alphabet(self):
        with pytest.raises(DistributionError, match="lie in"):
            SymbolSequence([0, 2], 2)

    def test_rejects_empty(self):
        with pytest.raises(DistributionError):
            SymbolSequence([], 2)
