"""Tests for information measures, distribution algebra and total-variation properties."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DistributionError, EnumerationLimitError
from core.prob.distributions import Channel, DistortionMeasure, JointPmf, Pmf, SymbolSequence
from core.prob.measures import (
    attach,
    cascade,
    compose,
    conditional,
    conditional_mutual_information,
    entropy,
    expected_distortion,
    iid_extension,
    kl_divergence,
    marginal,
    marginalize,
    mutual_information,
    reorder,
    reverse_channel,
    sequence_distortion,
    sequence_index,
    sequence_space,
    total_variation,
)


def binary_entropy(p: float) -> float:
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def _normalized(weights) -> np.ndarray:
    values = np.asarray(weights, dtype=float)
    return values / values.sum()


def weight_lists(size: int):
    return st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=size, max_size=size).filter(
        lambda values: sum(values) > 1e-3
    )


@st.composite
def pmfs(draw, size: int = 0):
    size = size or draw(st.integers(min_value=2, max_value=5))
    return Pmf(_normalized(draw(weight_lists(size))))


@st.composite
def pmf_triples(draw):
    size = draw(st.integers(min_value=2, max_value=5))
    return tuple(draw(pmfs(size)) for _ in range(3))


@st.composite
def channels(draw, inputs: int, outputs: int):
    return Channel(np.array([_normalized(draw(weight_lists(outputs))) for _ in range(inputs)]))


@st.composite
def joints(draw, shape=None):
    shape = shape or (draw(st.integers(2, 4)), draw(st.integers(2, 4)))
    weights = draw(weight_lists(int(np.prod(shape))))
    return JointPmf(_normalized(weights).reshape(shape), tuple(f"A{i}" for i in range(len(shape))))


class TestTotalVariation:
    """Test total_variation values and properties."""

    def test_identical_is_zero(self):
        p = Pmf([0.2, 0.3, 0.5])
        assert total_variation(p, p) == 0.0

    def test_disjoint_supports(self):
        assert total_variation(Pmf.point_mass(2, 0), Pmf.point_mass(2, 1)) == 1.0

    def test_half_l1(self):
        assert total_variation(Pmf.bernoulli(0.5), Pmf.bernoulli(0.25)) == pytest.approx(0.25)

    def test_shape_mismatch(self):
        with pytest.raises(DistributionError, match="shapes"):
            total_variation(Pmf.uniform(2), Pmf.uniform(3))

    @settings(max_examples=1000, deadline=None)
    @given(pmf_triples(), st.floats(min_value=0.1, max_value=10.0), st.data())
    def test_bounded_function_gap(self, triple, width, data):
        p, q, _ = triple
        f = np.array(
            [data.draw(st.floats(min_value=0.0, max_value=1.0)) for _ in range(p.size)]
        ) * width
        gap = abs(float(p.probs @ f) - float(q.probs @ f))
        assert gap <= width * total_variation(p, q) + 1e-12

    @settings(max_examples=1000, deadline=None)
    @given(pmf_triples())
    def test_triangle_inequality(self, triple):
        p, q, r = triple
        assert total_variation(p, q) <= total_variation(p, r) + total_variation(r, q) + 1e-12

    @settings(max_examples=1000, deadline=None)
    @given(pmf_triples(), st.integers(min_value=2, max_value=4), st.data())
    def test_common_channel_preserves_tv(self, triple, outputs, data):
        p, q, _ = triple
        ch = data.draw(channels(p.size, outputs))
        assert abs(total_variation(compose(p, ch), compose(q, ch)) - total_variation(p, q)) <= 1e-12

    @settings(max_examples=1000, deadline=None)
    @given(st.data())
    def test_marginal_tv_below_joint_tv(self, data):
        shape = (data.draw(st.integers(2, 4)), data.draw(st.integers(2, 4)))
        first, second = data.draw(joints(shape)), data.draw(joints(shape))
        for axis in (0, 1):
            assert total_variation(marginalize(first, axis), marginalize(second, axis)) <= (
                total_variation(first, second) + 1e-12
            )

    @settings(max_examples=1000, deadline=None)
    @given(st.data(), st.floats(min_value=0.0, max_value=1.0))
    def test_disagreement_bounds_tv(self, data, epsilon):
        size_u = data.draw(st.integers(2, 4))
        size_x = data.draw(st.integers(2, 3))
        p_ux = data.draw(joints((size_u, size_x))).probs
        scatter = np.array(
            [[_normalized(data.draw(weight_lists(size_u))) for _ in range(size_x)] for _ in range(size_u)]
        )
        # P(u, v, x) = P(u, x) [(1 - eps) 1{v = u} + eps r(v | u, x)]
        probs = np.zeros((size_u, size_u, size_x))
        for u, x in itertools.product(range(size_u), range(size_x)):
            probs[u, :, x] = p_ux[u, x] * epsilon * scatter[u, x]
            probs[u, u, x] += p_ux[u, x] * (1 - epsilon)
        joint = JointPmf(probs / probs.sum(), ("U", "V", "X"))
        disagreement = sum(joint.probs[u, v].sum() for u in range(size_u) for v in range(size_u) if u != v)
        assert disagreement <= epsilon + 1e-12
        assert total_variation(marginal(joint, "U", "X"), marginal(joint, "V", "X")) <= disagreement + 1e-12


class TestEntropyAndInformation:
    """Test entropy, KL divergence and mutual information."""

    def test_entropy_values(self):
        assert entropy(Pmf.point_mass(3, 2)) == 0.0
        assert entropy(Pmf.uniform(4)) == pytest.approx(2.0)
        assert entropy(Pmf.bernoulli(0.11)) == pytest.approx(0.49981, abs=1e-5)

    def test_kl_divergence(self):
        assert kl_divergence(Pmf.uniform(2), Pmf.uniform(2)) == 0.0
        assert kl_divergence(Pmf.point_mass(2, 0), Pmf.uniform(2)) == pytest.approx(1.0)
        assert kl_divergence(Pmf.uniform(2), Pmf.point_mass(2, 0)) == np.inf

    def test_mutual_information_values(self):
        independent = compose(Pmf([0.3, 0.7]), Channel.constant(Pmf([0.4, 0.6]), 2))
        assert mutual_information(independent) == pytest.approx(0.0, abs=1e-12)
        assert mutual_information(compose(Pmf.uniform(2), Channel.identity(2))) == pytest.approx(1.0)
        bsc = compose(Pmf.uniform(2), Channel.bsc(0.11))
        assert mutual_information(bsc) == pytest.approx(1 - binary_entropy(0.11), abs=1e-12)
        assert mutual_information(bsc) == pytest.approx(0.50019, abs=1e-5)

    def test_mutual_information_needs_two_axes(self):
        with pytest.raises(DistributionError, match="2-axis"):
            mutual_information(JointPmf(np.full((2, 2, 2), 0.125)))

    @settings(max_examples=300, deadline=None)
    @given(joints())
    def test_information_bounds(self, joint):
        i_ab = mutual_information(joint)
        h_a, h_b = entropy(marginalize(joint, 1)), entropy(marginalize(joint, 0))
        assert i_ab >= 0.0
        assert h_a >= 0.0 and h_b >= 0.0
        assert i_ab <= min(h_a, h_b) + 1e-9


class TestConditionalMutualInformation:
    """Test I(axis0; axis1 | axis2)."""

    def test_independent_middle_axis(self):
        p_ac = np.array([[0.1, 0.2], [0.3, 0.4]])
        p_b = np.array([0.25, 0.75])
        joint = JointPmf(p_ac[:, None, :] * p_b[None, :, None])
        assert conditional_mutual_information(joint) == pytest.approx(0.0, abs=1e-12)

    def test_constant_condition(self):
        pair = compose(Pmf([0.3, 0.7]), Channel.bsc(0.2))
        joint = JointPmf(pair.probs[:, :, None])
        assert conditional_mutual_information(joint) == pytest.approx(mutual_information(pair), abs=1e-12)

    def test_chain_against_direct_sum(self):
        # V - X - B with X uniform, P_{V|X} = BSC(0.2), P_{B|X} = BSC(0.1); axes (X, V, B)
        joint_xv = compose(Pmf.uniform(2), Channel.bsc(0.2), ("X", "V"))
        joint = attach(joint_xv, Channel.bsc(0.1), "X", "B")
        probs = joint.probs
        expected = 0.0
        for x, v, b in itertools.product(range(2), repeat=3):
            p = probs[x, v, b]
            if p > 0:
                p_b = probs[:, :, b].sum()
                expected += p * np.log2(p * p_b / (probs[x, :, b].sum() * probs[:, v, b].sum()))
        assert conditional_mutual_information(joint) == pytest.approx(expected, abs=1e-12)
        assert conditional_mutual_information(joint) > 0

    def test_needs_three_axes(self):
        with pytest.raises(DistributionError, match="3-axis"):
            conditional_mutual_information(compose(Pmf.uniform(2), Channel.bsc(0.1)))


class TestDistributionAlgebra:
    """Test compose, marginals, conditionals and channel helpers."""

    def test_compose_values(self):
        joint = compose(Pmf.uniform(2), Channel.bsc(0.1))
        assert np.allclose(joint.probs, [[0.45, 0.05], [0.05, 0.45]], atol=1e-15)
        point = compose(Pmf.point_mass(2, 0), Channel.bsc(0.3))
        assert point.probs[1].sum() == 0.0
        diagonal = compose(Pmf([0.2, 0.8]), Channel.identity(2))
        assert np.array_equal(diagonal.probs, np.diag([0.2, 0.8]))

    def test_compose_alphabet_mismatch(self):
        with pytest.raises(DistributionError, match="does not match"):
            compose(Pmf.uniform(3), Channel.bsc(0.1))

    def test_marginalize_recovers_source(self):
        p = Pmf([0.1, 0.6, 0.3])
        ch = Channel([[0.5, 0.5], [0.2, 0.8], [1.0, 0.0]])
        back = marginalize(compose(p, ch), 1)
        assert isinstance(back, Pmf)
        assert np.allclose(back.probs, p.probs, atol=1e-15)

    def test_marginalize_product(self):
        product = JointPmf(np.outer([0.3, 0.7], [0.1, 0.2, 0.7]))
        assert np.allclose(marginalize(product, 0).probs, [0.1, 0.2, 0.7])

    def test_marginalize_random_joint(self):
        rng = np.random.default_rng(4)
        table = rng.random((2, 3))
        joint = JointPmf(table / table.sum(), ("X", "Y"))
        assert np.allclose(marginalize(joint, "Y").probs, [row.sum() for row in joint.probs])
        assert np.allclose(marginalize(joint, "X").probs, [col.sum() for col in joint.probs.T])

    def test_marginal_order(self):
        table = np.arange(1, 9, dtype=float).reshape(2, 2, 2)
        joint = JointPmf(table / table.sum(), ("A", "B", "C"))
        swapped = marginal(joint, "C", "A")
        assert swapped.axes == ("C", "A")
        assert np.allclose(swapped.probs, joint.probs.sum(axis=1).T)
        with pytest.raises(DistributionError, match="Repeated"):
            marginal(joint, "A", "A")

    def test_reorder(self):
        joint = compose(Pmf([0.3, 0.7]), Channel.bsc(0.2), ("X", "Y"))
        flipped = reorder(joint, ("Y", "X"))
        assert np.array_equal(flipped.probs, joint.probs.T)
        with pytest.raises(DistributionError, match="permutation"):
            reorder(joint, ("X",))

    def test_conditional_and_reverse_channel(self):
        p = Pmf([0.25, 0.75])
        ch = Channel.bsc(0.2)
        joint = compose(p, ch)
        forward = conditional(joint, given=0)
        assert np.allclose(forward.rows, ch.rows)
        backward, unreachable = reverse_channel(p, ch)
        assert unreachable == []
        assert np.allclose(backward.rows, conditional(joint, given=1).rows)
        assert backward.rows[0, 0] == pytest.approx(0.25 * 0.8 / (0.25 * 0.8 + 0.75 * 0.2))

    def test_reverse_channel_unreachable_outputs(self):
        ch = Channel([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        backward, unreachable = reverse_channel(Pmf.uniform(2), ch)
        assert unreachable == [2]
        assert backward.rows[2].tolist() == [0.5, 0.5]

    def test_cascade(self):
        combined = cascade(Channel.bsc(0.1), Channel.bsc(0.2))
        assert combined.rows[0, 1] == pytest.approx(0.1 * 0.8 + 0.9 * 0.2)
        with pytest.raises(DistributionError, match="cascade"):
            cascade(Channel.bsc(0.1), Channel([[1.0, 0.0, 0.0]] * 3))

    def test_attach_appends_axis(self):
        joint = compose(Pmf.uniform(2), Channel.bsc(0.1), ("X", "B"))
        extended = attach(joint, Channel.bsc(0.15), "X", "V")
        assert extended.axes == ("X", "B", "V")
        assert np.allclose(marginal(extended, "X", "V").probs, compose(Pmf.uniform(2), Channel.bsc(0.15)).probs)


class TestSequences:
    """Test sequence spaces, i.i.d. extensions and distortion."""

    def test_iid_extension_values(self):
        p = Pmf.bernoulli(0.3)
        assert np.allclose(iid_extension(p, 1).probs, p.probs)
        assert np.allclose(iid_extension(p, 2).probs, [0.49, 0.21, 0.21, 0.09])
        point = iid_extension(Pmf.point_mass(3, 2), 3)
        assert point.probs[sequence_index([2, 2, 2], 3)] == 1.0

    @settings(max_examples=100, deadline=None)
    @given(pmfs(), st.integers(min_value=1, max_value=5))
    def test_iid_extension_marginals(self, p, n):
        ext = iid_extension(p, n)
        assert abs(ext.probs.sum() - 1.0) <= n * 1e-9
        table = ext.probs.reshape((p.size,) * n)
        for t in range(n):
            others = tuple(axis for axis in range(n) if axis != t)
            assert np.allclose(table.sum(axis=others) if others else table, p.probs, atol=1e-12)

    def test_enumeration_guard(self):
        with pytest.raises(EnumerationLimitError):
            iid_extension(Pmf.uniform(2), 21)
        with pytest.raises(EnumerationLimitError):
            sequence_space(4, 11)

    def test_sequence_space_is_row_major(self):
        space = sequence_space(2, 3)
        assert space.shape == (8, 3)
        assert space[1].tolist() == [0, 0, 1]
        assert space[6].tolist() == [1, 1, 0]
        assert all(sequence_index(row, 2) == index for index, row in enumerate(space))

    def test_sequence_distortion(self):
        d = DistortionMeasure.hamming(2)
        x = SymbolSequence([0, 1, 1, 0], 2)
        assert sequence_distortion(d, x, x) == 0.0
        assert sequence_distortion(d, x, SymbolSequence([1, 0, 0, 1], 2)) == 1.0
        assert sequence_distortion(d, x, SymbolSequence([0, 1, 1, 1], 2)) == 0.25

    def test_sequence_distortion_length_mismatch(self):
        d = DistortionMeasure.hamming(2)
        with pytest.raises(DistributionError, match="lengths"):
            sequence_distortion(d, SymbolSequence([0], 2), SymbolSequence([0, 1], 2))

    def test_expected_distortion(self):
        d = DistortionMeasure.hamming(2)
        assert expected_distortion(compose(Pmf([0.4, 0.6]), Channel.identity(2)), d) == 0.0
        assert expected_distortion(compose(Pmf.uniform(2), Channel.bsc(0.1)), d) == pytest.approx(0.1)
        constant = DistortionMeasure(np.full((2, 2), 0.7))
        assert expected_distortion(compose(Pmf([0.2, 0.8]), Channel.bsc(0.3)), constant) == pytest.approx(0.7)
