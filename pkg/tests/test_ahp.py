import numpy as np
import pytest

from prefstudy.ahp import (
    BIPOLAR_SCALE,
    DuplicateJudgmentError,
    IncompleteJudgmentsError,
    JudgmentError,
    PairwiseMatrix,
    PriorityVector,
    SaatyGrade,
    consistency_report,
    ev_priorities,
    filter_by_cr,
    llsm_priorities,
    matrix_from_judgments,
)

INCONSISTENT_3X3 = np.array([[1.0, 2.0, 0.5], [0.5, 1.0, 4.0], [2.0, 0.25, 1.0]])
# dominant root of its characteristic cubic (independent closed-form solve)
LAMBDA_MAX_3X3 = 3.916692362781797


def all_pairs_judgments(n, grade):
    return [(i, j, grade) for i in range(n) for j in range(i + 1, n)]


def test_saaty_grade_validation():
    SaatyGrade(9, "left")
    SaatyGrade(1, "none")
    with pytest.raises(JudgmentError):
        SaatyGrade(1, "left")  # intensity 1 must mean indifference
    with pytest.raises(JudgmentError):
        SaatyGrade(5, "none")
    with pytest.raises(JudgmentError):
        SaatyGrade(10, "left")
    with pytest.raises(JudgmentError):
        SaatyGrade(3, "both")


def test_bipolar_scale_is_bijective_and_centered():
    assert len(BIPOLAR_SCALE) == 9
    assert BIPOLAR_SCALE[4] == (1, "none")
    assert len(set(BIPOLAR_SCALE)) == 9
    assert BIPOLAR_SCALE[0] == (9, "left") and BIPOLAR_SCALE[-1] == (9, "right")


def test_matrix_from_single_judgment():
    m = matrix_from_judgments(2, [(0, 1, SaatyGrade(5, "left"))])
    assert m.values == pytest.approx(np.array([[1.0, 5.0], [0.2, 1.0]]))


def test_matrix_right_favored_and_none():
    m = matrix_from_judgments(2, [(0, 1, SaatyGrade(7, "right"))])
    assert m.values[0, 1] == pytest.approx(1 / 7)
    m = matrix_from_judgments(3, all_pairs_judgments(3, SaatyGrade(1, "none")))
    assert m.values == pytest.approx(np.ones((3, 3)))


def test_nine_items_need_36_judgments():
    judgments = all_pairs_judgments(9, SaatyGrade(1, "none"))
    assert len(judgments) == 36
    m = matrix_from_judgments(9, judgments)
    assert m.n == 9
    with pytest.raises(IncompleteJudgmentsError) as err:
        matrix_from_judgments(9, judgments[:-1])
    assert err.value.missing == [(7, 8)]


def test_duplicate_judgment_rejected():
    judgments = all_pairs_judgments(3, SaatyGrade(1, "none"))
    judgments.append((1, 0, SaatyGrade(3, "left")))
    with pytest.raises(DuplicateJudgmentError):
        matrix_from_judgments(3, judgments)


def test_reciprocity_enforced_exactly():
    rng = np.random.default_rng(1)
    for _ in range(20):
        n = int(rng.integers(2, 10))
        judgments = []
        for i in range(n):
            for j in range(i + 1, n):
                intensity = int(rng.integers(1, 10))
                favored = "none" if intensity == 1 else ("left" if rng.random() < 0.5 else "right")
                judgments.append((i, j, SaatyGrade(intensity, favored)))
        m = matrix_from_judgments(n, judgments)
        assert np.abs(m.values * m.values.T - 1.0).max() <= 1e-12
        assert np.abs(np.diag(m.values) - 1.0).max() == 0.0


def test_nonreciprocal_matrix_rejected():
    with pytest.raises(JudgmentError):
        PairwiseMatrix(np.array([[1.0, 2.0], [1.0, 1.0]]))


def test_consistent_matrix_recovers_weights_with_zero_cr():
    w = np.array([0.6, 0.3, 0.1])
    m = PairwiseMatrix(w[:, None] / w[None, :])
    priorities, report = ev_priorities(m)
    assert priorities.weights == pytest.approx(w, abs=1e-10)
    assert report.cr == pytest.approx(0.0, abs=1e-10)
    assert report.lambda_max == pytest.approx(3.0, abs=1e-9)
    assert report.acceptable_at_0_1 and report.acceptable_at_0_2


def test_all_ones_9x9():
    m = PairwiseMatrix(np.ones((9, 9)))
    priorities, report = ev_priorities(m)
    assert priorities.weights == pytest.approx(np.full(9, 1 / 9), abs=1e-12)
    assert report.cr == pytest.approx(0.0, abs=1e-12)


def test_inconsistent_3x3_cr_matches_cubic_oracle():
    m = PairwiseMatrix(INCONSISTENT_3X3)
    _, report = ev_priorities(m)
    assert report.lambda_max == pytest.approx(LAMBDA_MAX_3X3, abs=1e-9)
    expected_cr = ((LAMBDA_MAX_3X3 - 3) / 2) / 0.58
    assert report.cr == pytest.approx(expected_cr, abs=1e-9)
    assert not report.acceptable_at_0_2


def test_llsm_matches_hand_geometric_means():
    m = PairwiseMatrix(INCONSISTENT_3X3)
    got = llsm_priorities(m)
    gm = np.array([np.prod(INCONSISTENT_3X3[i]) ** (1 / 3) for i in range(3)])
    assert got.weights == pytest.approx(gm / gm.sum(), abs=1e-12)


def test_llsm_equals_ev_on_consistent_matrices():
    rng = np.random.default_rng(9)
    for _ in range(10):
        n = int(rng.integers(2, 10))
        w = rng.uniform(0.1, 1.0, size=n)
        w /= w.sum()
        m = PairwiseMatrix(w[:, None] / w[None, :])
        ev, _ = ev_priorities(m)
        ll = llsm_priorities(m)
        assert ev.weights == pytest.approx(ll.weights, abs=1e-9)


def random_reciprocal(rng, n):
    a = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = np.exp(rng.normal())
            a[j, i] = 1.0 / a[i, j]
    return PairwiseMatrix(a)


def test_permutation_invariance_of_ranking():
    rng = np.random.default_rng(31)
    m = random_reciprocal(rng, 5)
    perm = rng.permutation(5)
    permuted = PairwiseMatrix(m.values[np.ix_(perm, perm)])
    w, _ = ev_priorities(m)
    wp, _ = ev_priorities(permuted)
    assert wp.weights == pytest.approx(w.weights[perm], abs=1e-9)
    assert list(np.argsort(wp.weights)) == list(np.argsort(w.weights[perm]))


def test_cr_undefined_below_three_items():
    report = consistency_report(2.0, 2)
    assert report.cr == 0.0 and not report.cr_defined
    report = consistency_report(1.0, 1)
    assert report.cr == 0.0 and not report.cr_defined


def test_random_index_bounds():
    with pytest.raises(JudgmentError):
        consistency_report(12.0, 11)


def test_priority_vector_invariants():
    with pytest.raises(JudgmentError):
        PriorityVector(np.array([0.5, 0.6]))
    with pytest.raises(JudgmentError):
        PriorityVector(np.array([1.2, -0.2]))


def make_report(cr):
    from prefstudy.ahp import ConsistencyReport

    return ConsistencyReport(
        lambda_max=3 + cr * 2 * 0.58, ci=cr * 0.58, ri=0.58, cr=cr,
        acceptable_at_0_1=cr <= 0.1, acceptable_at_0_2=cr <= 0.2, cr_defined=True,
    )


def test_filter_by_cr_membership():
    records = [(f"s{i}", make_report(cr)) for i, cr in enumerate([0.05, 0.2, 0.21, 0.5, 0.19])]
    result = filter_by_cr(records, 0.2)
    assert result.retained == ("s0", "s1", "s4")
    assert result.excluded == ("s2", "s3")
    assert result.n_excluded == 2


def test_filter_by_cr_paper_shaped_cohort():
    # 32 subjects, 12 beyond the 0.2 cutoff
    crs = [0.05 + 0.004 * i for i in range(20)] + [0.25 + 0.02 * i for i in range(12)]
    records = [(f"p{i:02d}", make_report(cr)) for i, cr in enumerate(crs)]
    result = filter_by_cr(records, 0.2)
    assert len(result.retained) == 20
    assert result.n_excluded == 12


def test_filter_by_cr_infinite_cutoff_retains_all():
    records = [(f"s{i}", make_report(cr)) for i, cr in enumerate([0.1, 5.0, 0.9])]
    assert filter_by_cr(records, float("inf")).excluded == ()
