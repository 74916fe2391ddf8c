import numpy as np
import pytest

from prefstudy.numerics import DomainError, SingularDesignError, ols


def normal_equations_fit(x, y):
    """Independent oracle: explicit normal-equations solve."""
    xtx = x.T @ x
    beta = np.linalg.solve(xtx, x.T @ y)
    resid = y - x @ beta
    s2 = (resid @ resid) / (x.shape[0] - x.shape[1])
    se = np.sqrt(s2 * np.diag(np.linalg.inv(xtx)))
    return beta, se, resid


def test_perfect_line():
    x = np.column_stack([np.ones(5), np.arange(5.0)])
    fit = ols(x, 2.0 * np.arange(5.0) + 1.0)
    assert fit.coefficients == pytest.approx([1.0, 2.0], abs=1e-12)
    assert fit.r_squared == 1.0
    assert fit.f_p == 0.0


def test_five_point_hand_dataset_vs_normal_equations():
    x = np.column_stack([np.ones(5), np.array([0.0, 1.0, 2.0, 3.0, 4.0])])
    y = np.array([1.1, 1.9, 3.2, 3.8, 5.1])
    fit = ols(x, y)
    beta, se, resid = normal_equations_fit(x, y)
    assert fit.coefficients == pytest.approx(beta, abs=1e-8)
    assert fit.std_errors == pytest.approx(se, abs=1e-8)
    assert fit.residuals == pytest.approx(resid, abs=1e-8)


def test_qr_agrees_with_normal_equations_on_random_designs():
    rng = np.random.default_rng(101)
    for _ in range(25):
        n = int(rng.integers(6, 40))
        p = int(rng.integers(2, 6))
        x = np.column_stack([np.ones(n), rng.normal(size=(n, p - 1))])
        y = rng.normal(size=n)
        fit = ols(x, y)
        beta, se, _ = normal_equations_fit(x, y)
        assert fit.coefficients == pytest.approx(beta, abs=1e-8)
        assert fit.std_errors == pytest.approx(se, abs=1e-8)


def test_residuals_orthogonal_to_design():
    rng = np.random.default_rng(7)
    x = np.column_stack([np.ones(30), rng.normal(size=(30, 3))])
    y = rng.normal(size=30)
    fit = ols(x, y)
    scale = np.abs(x).max() * np.abs(y).max()
    assert np.abs(x.T @ fit.residuals).max() <= 1e-9 * scale


def test_r_squared_and_f_statistics():
    rng = np.random.default_rng(13)
    x = np.column_stack([np.ones(50), rng.normal(size=(50, 2))])
    y = x @ np.array([1.0, 0.5, -0.25]) + rng.normal(scale=0.3, size=50)
    fit = ols(x, y)
    tss = ((y - y.mean()) ** 2).sum()
    rss = fit.residuals @ fit.residuals
    assert fit.r_squared == pytest.approx(1 - rss / tss, abs=1e-12)
    assert fit.df_error == 47
    f = ((tss - rss) / 2) / (rss / 47)
    assert fit.f_stat == pytest.approx(f, rel=1e-10)


def test_singular_design_names_dependent_column():
    x = np.column_stack([np.ones(8), np.arange(8.0), 3.0 * np.arange(8.0)])
    with pytest.raises(SingularDesignError) as err:
        ols(x, np.arange(8.0))
    assert err.value.column == 2


def test_underdetermined_rejected():
    with pytest.raises(DomainError):
        ols(np.ones((3, 3)), np.ones(3))
