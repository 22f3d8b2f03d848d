"""Similarity core: centering, Pearson limit, joint refinement, fixed point."""

from __future__ import annotations

import numpy as np
import pytest

import naive_oracle as oracle
from socsem import (
    CenteredViews,
    IncidenceMatrix,
    NumericError,
    SimilarityMatrix,
    UnknownLabelError,
    ValidationError,
    center,
    pearson_actors,
    pearson_attributes,
    run_fixed_point,
    similarity_between,
    similarity_step,
)
from socsem.packed import identity_packed, packed_length

from helpers import incidence_from_array, random_incidence


def identities_for(matrix: IncidenceMatrix) -> tuple[SimilarityMatrix, SimilarityMatrix]:
    return (
        SimilarityMatrix.identity(matrix.attribute_labels, "attribute"),
        SimilarityMatrix.identity(matrix.actor_labels, "actor"),
    )


class TestCenter:
    def test_single_column_example(self):
        matrix = incidence_from_array(np.array([[1, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=np.uint8))
        views = center(matrix)
        np.testing.assert_allclose(
            views.centered_columns[:, 0], [1 / 3, 1 / 3, -2 / 3], atol=1e-15
        )

    def test_row_example(self):
        matrix = incidence_from_array(np.array([[1, 0], [0, 1]], dtype=np.uint8))
        views = center(matrix)
        np.testing.assert_allclose(views.centered_rows[0], [0.5, -0.5], atol=1e-16)

    def test_centered_sums_vanish(self):
        views = center(random_incidence(np.random.default_rng(3), 25, 12, 0.3))
        assert np.abs(views.centered_rows.sum(axis=1)).max() < 1e-12
        assert np.abs(views.centered_columns.sum(axis=0)).max() < 1e-12

    def test_zero_centered_vector_rejected(self):
        rows = np.array([[0.5, -0.5], [0.0, 0.0]])
        with pytest.raises(ValidationError, match="zero vector"):
            CenteredViews(rows, rows.copy(), ("u1", "u2"), ("a", "b"))


class TestPearson:
    def test_opposite_columns(self):
        matrix = incidence_from_array(np.array([[1, 0], [0, 1]], dtype=np.uint8))
        sigma = pearson_attributes(center(matrix))
        assert sigma.between("t000", "t001") == pytest.approx(-1.0, abs=1e-12)

    def test_half_correlation_example(self):
        # Columns (1,1,0) and (1,0,0): dot of centered pair is 1/3, both
        # norms sqrt(6)/3, so the correlation is exactly 0.5.  The third
        # column only pads the matrix into validity and changes nothing.
        matrix = incidence_from_array(
            np.array([[1, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=np.uint8)
        )
        sigma = pearson_attributes(center(matrix))
        assert sigma.between("t000", "t001") == pytest.approx(0.5, abs=1e-15)

    def test_oracle_agrees_on_the_unpadded_matrix(self):
        raw = [[1.0, 1.0], [1.0, 0.0], [0.0, 0.0]]
        columns = oracle.centered_columns(raw)
        out = oracle.attribute_update(columns, oracle.identity(3))
        assert out[0][1] == pytest.approx(0.5, abs=1e-15)

    def test_matches_numpy_corrcoef(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            matrix = random_incidence(rng, int(rng.integers(5, 30)), int(rng.integers(4, 20)), 0.35)
            views = center(matrix)
            np.testing.assert_allclose(
                pearson_attributes(views).to_dense(),
                np.corrcoef(matrix.entries.astype(float), rowvar=False),
                atol=1e-12,
            )
            np.testing.assert_allclose(
                pearson_actors(views).to_dense(),
                np.corrcoef(matrix.entries.astype(float)),
                atol=1e-12,
            )


class TestSimilarityStep:
    def test_identity_step_is_the_pearson_pair_bitwise(self):
        matrix = random_incidence(np.random.default_rng(0), 20, 10, 0.3)
        views = center(matrix)
        attribute_next, actor_next = similarity_step(views, *identities_for(matrix))
        assert np.array_equal(attribute_next.values, pearson_attributes(views).values)
        assert np.array_equal(actor_next.values, pearson_actors(views).values)

    def test_outputs_satisfy_invariants(self):
        matrix = random_incidence(np.random.default_rng(1), 15, 8, 0.4)
        views = center(matrix)
        pair = similarity_step(views, *identities_for(matrix))
        for sim in pair:
            dense = sim.to_dense()
            assert np.array_equal(dense, dense.T)
            assert (np.diagonal(dense) == 1.0).all()
            assert np.abs(dense).max() <= 1.0 + 1e-9

    def test_two_steps_match_oracle(self):
        matrix = random_incidence(np.random.default_rng(2), 9, 6, 0.35)
        views = center(matrix)
        listed = [[float(x) for x in row] for row in matrix.entries]
        attribute_sim, actor_sim = identities_for(matrix)
        oracle_attr, oracle_actor = oracle.identity(6), oracle.identity(9)
        for _ in range(2):
            attribute_sim, actor_sim = similarity_step(views, attribute_sim, actor_sim)
            oracle_attr, oracle_actor = oracle.step(listed, oracle_attr, oracle_actor)
        np.testing.assert_allclose(attribute_sim.to_dense(), np.array(oracle_attr), atol=1e-12)
        np.testing.assert_allclose(actor_sim.to_dense(), np.array(oracle_actor), atol=1e-12)

    def test_degenerate_metric_raises_numeric_error(self):
        # An all-ones metric zeroes every centered quadratic form.
        matrix = random_incidence(np.random.default_rng(3), 8, 5, 0.4)
        views = center(matrix)
        attribute_identity, actor_identity = identities_for(matrix)
        ones_actor = SimilarityMatrix(
            np.ones(packed_length(8)), matrix.actor_labels, "actor"
        )
        with pytest.raises(NumericError, match="quadratic form for attribute"):
            similarity_step(views, attribute_identity, ones_actor)
        ones_attribute = SimilarityMatrix(
            np.ones(packed_length(5)), matrix.attribute_labels, "attribute"
        )
        with pytest.raises(NumericError, match="quadratic form for actor"):
            similarity_step(views, ones_attribute, actor_identity)

    def test_mismatched_labels_rejected(self):
        matrix = random_incidence(np.random.default_rng(4), 6, 4, 0.4)
        views = center(matrix)
        attribute_identity, actor_identity = identities_for(matrix)
        stranger = SimilarityMatrix.identity(("x", "y", "z", "w"), "attribute")
        with pytest.raises(ValidationError):
            similarity_step(views, stranger, actor_identity)
        with pytest.raises(ValidationError):
            similarity_step(views, actor_identity, attribute_identity)


class TestSimilarityMatrix:
    def test_unknown_label_raises(self):
        sim = SimilarityMatrix.identity(("a", "b"), "attribute")
        assert similarity_between(sim, "a", "b") == 0.0
        assert similarity_between(sim, "a", "a") == 1.0
        with pytest.raises(UnknownLabelError, match="nope"):
            similarity_between(sim, "a", "nope")

    def test_symmetric_lookup(self):
        matrix = random_incidence(np.random.default_rng(6), 10, 6, 0.4)
        sim = pearson_attributes(center(matrix))
        for a in sim.labels[:3]:
            for b in sim.labels[:3]:
                assert sim.between(a, b) == sim.between(b, a)

    def test_diagonal_must_be_one(self):
        values = identity_packed(3)
        values[0] = 0.5
        with pytest.raises(ValidationError, match="diagonal"):
            SimilarityMatrix(values, ("a", "b", "c"), "attribute")

    def test_range_slack_is_tight(self):
        values = identity_packed(2)
        values[1] = 1.0 + 2e-9
        with pytest.raises(ValidationError, match="magnitude"):
            SimilarityMatrix(values, ("a", "b"), "attribute")
        values[1] = 1.0 + 5e-10  # inside the slack
        SimilarityMatrix(values, ("a", "b"), "attribute")

    def test_length_and_label_checks(self):
        with pytest.raises(ValidationError):
            SimilarityMatrix(identity_packed(3), ("a", "b"), "attribute")
        with pytest.raises(ValidationError):
            SimilarityMatrix(identity_packed(2), ("a", "a"), "attribute")
        with pytest.raises(ValidationError):
            SimilarityMatrix(identity_packed(2), ("a", "b"), "weird")

    def test_values_are_frozen(self):
        sim = SimilarityMatrix.identity(("a", "b"), "actor")
        with pytest.raises(ValueError):
            sim.values[0] = 0.0

    def test_from_dense_requires_exact_symmetry(self):
        dense = np.eye(3)
        dense[0, 1] = 0.3
        with pytest.raises(ValidationError, match="symmetric"):
            SimilarityMatrix.from_dense(dense, ("a", "b", "c"), "attribute")


class TestRunFixedPoint:
    def test_opposite_columns_converge_to_minus_one(self):
        matrix = incidence_from_array(np.array([[1, 0], [0, 1]], dtype=np.uint8))
        result = run_fixed_point(center(matrix))
        assert result.report.terminated_by == "tolerance"
        assert result.attribute_similarity.between("t000", "t001") == pytest.approx(-1.0, abs=1e-12)
        assert result.actor_similarity.between("u000", "u001") == pytest.approx(-1.0, abs=1e-12)

    def test_single_iteration_equals_identity_step_bitwise(self):
        matrix = random_incidence(np.random.default_rng(8), 18, 9, 0.3)
        views = center(matrix)
        stepped = similarity_step(views, *identities_for(matrix))
        result = run_fixed_point(views, max_iterations=1)
        assert result.report.iterations == 1
        assert result.report.terminated_by == "max_iterations"
        assert np.array_equal(result.attribute_similarity.values, stepped[0].values)
        assert np.array_equal(result.actor_similarity.values, stepped[1].values)

    def test_matches_oracle_through_convergence(self):
        matrix = random_incidence(np.random.default_rng(9), 8, 6, 0.35)
        listed = [[float(x) for x in row] for row in matrix.entries]
        result = run_fixed_point(center(matrix), 1e-6, 200)
        o_attr, o_actor, o_deltas, o_reason = oracle.fixed_point(listed, 1e-6, 200)
        assert result.report.terminated_by == o_reason == "tolerance"
        assert result.report.iterations == len(o_deltas)
        np.testing.assert_allclose(
            result.attribute_similarity.to_dense(), np.array(o_attr), atol=1e-10
        )
        np.testing.assert_allclose(
            result.actor_similarity.to_dense(), np.array(o_actor), atol=1e-10
        )

    def test_tolerance_termination_means_both_deltas_small(self):
        matrix = random_incidence(np.random.default_rng(10), 6, 5, 0.35)
        result = run_fixed_point(center(matrix), 1e-6, 500)
        assert result.report.terminated_by == "tolerance"
        assert result.report.deltas["attribute"][-1] < 1e-6
        assert result.report.deltas["actor"][-1] < 1e-6
        assert result.report.iterations == len(result.report.deltas["attribute"])

    def test_reference_50x40_convergence_count(self):
        # Recorded from this implementation (cross-checked against the
        # scalar oracle at smaller sizes): seed 0, 50x40, density 0.2
        # reaches 1e-6 only after ~3.4e2 iterations; the slow mode is the
        # even/odd alternation of the simultaneous update schedule.
        from helpers import random_binary_matrix

        matrix = incidence_from_array(
            random_binary_matrix(np.random.default_rng(0), 50, 40, 0.2)
        )
        result = run_fixed_point(center(matrix), 1e-6, 1000)
        assert result.report.terminated_by == "tolerance"
        assert result.report.iterations == 342

    def test_iterates_keep_invariants_and_near_psd(self):
        matrix = random_incidence(np.random.default_rng(11), 12, 7, 0.35)
        views = center(matrix)
        attribute_sim, actor_sim = identities_for(matrix)
        for _ in range(12):
            attribute_sim, actor_sim = similarity_step(views, attribute_sim, actor_sim)
            for sim in (attribute_sim, actor_sim):
                dense = sim.to_dense()
                assert np.array_equal(dense, dense.T)
                assert (np.diagonal(dense) == 1.0).all()
                assert np.abs(dense).max() <= 1.0 + 1e-9
                assert np.linalg.eigvalsh(dense).min() >= -1e-8

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(12)
        matrix = random_incidence(rng, 14, 8, 0.35)
        row_perm = rng.permutation(14)
        col_perm = rng.permutation(8)
        shuffled = IncidenceMatrix(
            matrix.entries[np.ix_(row_perm, col_perm)],
            tuple(matrix.actor_labels[i] for i in row_perm),
            tuple(matrix.attribute_labels[j] for j in col_perm),
        )
        result = run_fixed_point(center(matrix), max_iterations=6)
        shuffled_result = run_fixed_point(center(shuffled), max_iterations=6)
        for a in matrix.attribute_labels:
            for b in matrix.attribute_labels:
                assert result.attribute_similarity.between(a, b) == pytest.approx(
                    shuffled_result.attribute_similarity.between(a, b), abs=1e-12
                )
        for a in matrix.actor_labels[:6]:
            for b in matrix.actor_labels[:6]:
                assert result.actor_similarity.between(a, b) == pytest.approx(
                    shuffled_result.actor_similarity.between(a, b), abs=1e-12
                )

    def test_bitwise_deterministic_and_worker_independent(self):
        matrix = random_incidence(np.random.default_rng(13), 30, 10, 0.3)
        views = center(matrix)
        first = run_fixed_point(views, max_iterations=8)
        again = run_fixed_point(views, max_iterations=8)
        threaded = run_fixed_point(views, max_iterations=8, workers=3)
        assert np.array_equal(first.attribute_similarity.values, again.attribute_similarity.values)
        assert np.array_equal(first.actor_similarity.values, again.actor_similarity.values)
        assert np.array_equal(first.attribute_similarity.values, threaded.attribute_similarity.values)
        assert np.array_equal(first.actor_similarity.values, threaded.actor_similarity.values)

    def test_float32_actor_storage(self):
        matrix = random_incidence(np.random.default_rng(14), 20, 8, 0.3)
        result = run_fixed_point(center(matrix), max_iterations=5, actor_dtype=np.float32)
        assert result.actor_similarity.values.dtype == np.float32
        assert result.attribute_similarity.values.dtype == np.float64
        dense = result.actor_similarity.to_dense()
        assert (np.diagonal(dense) == 1.0).all()
        assert np.abs(dense).max() <= 1.0 + 1e-9

    def test_bad_config_rejected(self):
        views = center(random_incidence(np.random.default_rng(15), 5, 4, 0.4))
        with pytest.raises(ValidationError):
            run_fixed_point(views, tolerance=0.0)
        with pytest.raises(ValidationError):
            run_fixed_point(views, max_iterations=0)
        with pytest.raises(ValidationError):
            run_fixed_point(views, actor_dtype=np.int32)
