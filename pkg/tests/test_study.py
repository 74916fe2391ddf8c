import numpy as np
import pytest

from conftest import make_record
from prefstudy.numerics import SymMatrix
from prefstudy.study import (
    Factor,
    StudyDesign,
    StudyError,
    covariance,
    summarize,
    to_correlation,
)


def test_demo_design_shape(demo_design):
    assert demo_design.n_items == 9
    assert demo_design.labels == ("MG", "SG", "LG", "MU", "SU", "LU", "MS", "SS", "LS")
    assert demo_design.is_full_factorial
    assert demo_design.level_of(demo_design.profiles[0], "Gap") == "Medium"
    assert demo_design.level_of(demo_design.profiles[0], "Background") == "Gaudy"


def test_full_factorial_constructor():
    design = StudyDesign.full_factorial(
        [Factor("A", ("a1", "a2")), Factor("B", ("b1", "b2", "b3"))]
    )
    assert design.n_items == 6
    assert design.is_full_factorial


def test_duplicate_labels_rejected():
    f = Factor("A", ("a1", "a2"))
    from prefstudy.study import Profile

    with pytest.raises(StudyError):
        StudyDesign(factors=(f,), profiles=(Profile("x", (0,)), Profile("x", (1,))))


def test_summary_single_subject():
    rec = make_record("solo", [0.5, 0.3, 0.2])
    s = summarize([rec])
    assert s.mean == pytest.approx([0.5, 0.3, 0.2])
    assert s.geometric_mean == pytest.approx([0.5, 0.3, 0.2])
    assert s.median == pytest.approx([0.5, 0.3, 0.2])
    assert s.std_dev == pytest.approx([0.0, 0.0, 0.0])


def test_summary_matches_hand_oracle():
    # three subjects, two profiles; spreadsheet-style expected values
    w = np.array([[0.2, 0.8], [0.4, 0.6], [0.3, 0.7]])
    recs = [make_record(f"s{i}", row) for i, row in enumerate(w)]
    s = summarize(recs)
    assert s.mean == pytest.approx([0.3, 0.7])
    assert s.geometric_mean == pytest.approx(
        [(0.2 * 0.4 * 0.3) ** (1 / 3), (0.8 * 0.6 * 0.7) ** (1 / 3)], abs=1e-12
    )
    assert s.std_dev == pytest.approx([0.1, 0.1], abs=1e-12)  # n-1 denominator
    assert s.mean_std_error == pytest.approx([0.1 / np.sqrt(3)] * 2, abs=1e-12)
    assert s.minimum == pytest.approx([0.2, 0.6])
    assert s.maximum == pytest.approx([0.4, 0.8])
    assert s.median == pytest.approx([0.3, 0.7])
    assert s.value_range == pytest.approx([0.2, 0.2], abs=1e-12)


def test_median_even_sample_averages_central_pair():
    recs = [make_record(f"s{i}", [w, 1 - w]) for i, w in enumerate([0.1, 0.2, 0.6, 0.7])]
    s = summarize(recs)
    assert s.median[0] == pytest.approx(0.4)


def test_published_mse_sd_relation():
    # mean standard error equals sd/sqrt(n): 0.121/sqrt(20) = 0.027 at table precision
    assert 0.121 / np.sqrt(20) == pytest.approx(0.027, abs=5e-4)


def test_summary_permutation_invariant_over_subjects(rng):
    w = rng.dirichlet(np.ones(4), size=6)
    recs = [make_record(f"s{i}", row) for i, row in enumerate(w)]
    s1 = summarize(recs)
    s2 = summarize(list(reversed(recs)))
    for name in ("mean", "geometric_mean", "std_dev", "median", "value_range"):
        assert getattr(s1, name) == pytest.approx(getattr(s2, name), abs=1e-15)


def test_summary_errors():
    with pytest.raises(StudyError):
        summarize([])
    with pytest.raises(StudyError):
        summarize([make_record("a", [0.6, 0.4]), make_record("b", [0.5, 0.3, 0.2])])


def test_identical_subjects_zero_covariance():
    recs = [make_record(f"s{i}", [0.6, 0.4]) for i in range(4)]
    cov = covariance(recs)
    assert np.abs(cov.values).max() == pytest.approx(0.0, abs=1e-15)


def test_two_point_covariance_hand_oracle():
    recs = [make_record("a", [0.6, 0.4]), make_record("b", [0.4, 0.6])]
    cov = covariance(recs)
    # deviations +-0.1 -> var 0.02, cross -0.02 with the n-1 denominator
    assert cov.values == pytest.approx(np.array([[0.02, -0.02], [-0.02, 0.02]]), abs=1e-15)


def test_covariance_requires_two_subjects():
    with pytest.raises(StudyError):
        covariance([make_record("a", [0.6, 0.4])])


def test_unit_sum_weights_mean_is_one_over_n(rng):
    w = rng.dirichlet(np.ones(9), size=12)
    recs = [make_record(f"s{i}", row) for i, row in enumerate(w)]
    s = summarize(recs)
    assert s.mean.mean() == pytest.approx(1 / 9, abs=1e-12)
    # covariance rows of unit-sum vectors sum to zero
    cov = covariance(recs)
    assert np.abs(cov.values.sum(axis=1)).max() <= 1e-10


def test_to_correlation_matches_direct_formula(demo_cov):
    corr = to_correlation(demo_cov)
    # spot value computed directly from the stored covariances
    expected = 0.0108 / np.sqrt(0.0145 * 0.0163)
    assert corr.values[0, 1] == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.703, abs=0.005)
    assert np.diag(corr.values) == pytest.approx(np.ones(9))
    assert np.abs(corr.values).max() <= 1.0 + 1e-9


def test_to_correlation_identity():
    corr = to_correlation(SymMatrix(np.eye(3)))
    assert corr.values == pytest.approx(np.eye(3))


def test_to_correlation_rejects_degenerate_variance():
    with pytest.raises(StudyError) as err:
        to_correlation(SymMatrix(np.array([[1.0, 0.0], [0.0, 0.0]])))
    assert "index [1]" in str(err.value)


def test_demo_covariance_rows_sum_near_zero_at_table_precision(demo_cov):
    # unit-sum weights make exact covariance rows sum to zero; the stored
    # matrix is rounded to four decimals, so only ~1e-3 closure survives
    assert np.abs(demo_cov.values.sum(axis=1)).max() <= 2e-3
