import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from attrgraph import adjust, latent
from attrgraph.errors import BadTemperature, EmptyClass

GRID = [round(0.05 * j, 2) for j in range(1, 21)]


def fap_oracle(u, T):
    w = [x ** (1.0 / T) for x in u]
    s = sum(w)
    return np.array([x / s for x in w])


def test_grid():
    np.testing.assert_allclose(adjust.T_GRID, GRID)


def test_rescale_examples():
    np.testing.assert_allclose(adjust.rescale_row([0.6, 0.4], 1.0), [0.6, 0.4], atol=1e-15)
    np.testing.assert_allclose(adjust.rescale_row([1 / 3] * 3, 0.2), [1 / 3] * 3, atol=1e-15)
    np.testing.assert_allclose(adjust.rescale_row([0.8, 0.2], 0.5), [0.64 / 0.68, 0.04 / 0.68],
                               atol=1e-15)


def test_rescale_bad_temperature():
    with pytest.raises(BadTemperature):
        adjust.rescale_row([0.5, 0.5], 0.0)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(2, 6), elements=st.floats(1e-3, 1.0)),
       st.sampled_from(GRID))
def test_rescale_matches_oracle(u, T):
    u = u / u.sum()
    np.testing.assert_allclose(adjust.rescale_row(u, T), fap_oracle(u, T), rtol=1e-9, atol=1e-12)


def grid_oracle(rows, M_row, l, positive):
    best, best_T = None, None
    for T in GRID:
        x = np.array([fap_oracle(r, T) for r in rows])
        y = x if positive else np.array([latent.reverse_membership_row(r, l) for r in x])
        loss = np.linalg.norm(M_row - (x * y).mean(axis=0))
        if best is None or loss < best - 1e-12:
            best, best_T = loss, T
    return best, best_T


def test_single_node_exact():
    U = np.array([[0.8, 0.2]])
    Up = U.copy()
    M = np.array([[0.64, 0.04], [0.5, 0.5]])
    res = adjust.adjust_class(U, Up, [1], M, 1, True)
    loss, T = grid_oracle([[0.8, 0.2]], M[0], 1, True)
    assert res.T_min == T == 1.0
    assert res.loss < 1e-12


def test_negative_one_hot():
    U = np.array([[1.0 - 2e-6, 1e-6, 1e-6]] * 3)
    Up = latent.reverse_rows(U, [1, 1, 1])
    M = np.array([[0.05, 0.5, 0.45], [0.3, 0.4, 0.3], [0.3, 0.3, 0.4]])
    rows = U.copy()
    res = adjust.adjust_class(U, Up, [1, 1, 1], M, 1, False)
    loss, T = grid_oracle(rows, M[0], 1, False)
    assert res.T_min == T
    assert abs(res.loss - loss) < 1e-12


def test_zero_loss_fixed_point():
    U = np.array([[0.5, 0.5], [0.5, 0.5]])
    Up = U.copy()
    M = np.array([[0.25, 0.25], [0.5, 0.5]])  # only row 1 matters
    res = adjust.adjust_class(U, Up, [1, 1], M, 1, True)
    assert res.loss == pytest.approx(0.0, abs=1e-15)


def test_empty_class():
    U = np.full((2, 2), 0.5)
    with pytest.raises(EmptyClass):
        adjust.adjust_class(U, U.copy(), [1, 1], np.full((2, 2), 0.5), 2, True)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5), st.booleans())
def test_adjust_matches_grid_and_never_worse(seed, k, positive):
    rng = np.random.default_rng(seed)
    n = 12
    C = np.concatenate([[1] * 6, rng.integers(2, k + 1, size=n - 6)])
    diag = rng.uniform(0.5, 0.95) if positive else rng.uniform(0.0, 0.9 / k)
    M = np.full((k, k), (1 - diag) / (k - 1))
    np.fill_diagonal(M, diag)
    U = rng.dirichlet(np.ones(k), size=n)
    Up = latent.derive_connection_proportions(U, C, M)
    rows = U[C == 1].copy()
    res = adjust.adjust_class(U, Up, C, M, 1, positive)
    loss, T = grid_oracle(rows, M[0], 1, positive)
    assert res.T_min == T
    assert abs(res.loss - loss) < 1e-12
    assert res.loss <= res.loss_before + 1e-12
    np.testing.assert_allclose(U.sum(axis=1), 1, atol=1e-6)
    np.testing.assert_allclose(Up.sum(axis=1), 1, atol=1e-6)


def test_identical_rows_stay_identical():
    U = np.tile([0.5, 0.3, 0.2], (5, 1))
    Up = U.copy()
    M = np.array([[0.8, 0.1, 0.1], [0.1, 0.8, 0.1], [0.1, 0.1, 0.8]])
    adjust.adjust_class(U, Up, [1] * 5, M, 1, True)
    assert np.ptp(U, axis=0).max() == 0


def test_class_mean_membership():
    U = np.array([[0.8, 0.2], [0.6, 0.4], [0.1, 0.9]])
    P = adjust.class_mean_membership(U, [1, 1, 2], 2)
    np.testing.assert_allclose(P, [[0.7, 0.3], [0.1, 0.9]])
    with pytest.raises(EmptyClass):
        adjust.class_mean_membership(U, [1, 1, 1], 2)


def test_attribute_grid_example():
    P = np.array([[0.9, 0.1], [0.1, 0.9]])
    H = np.array([[0.8, 0.2]])
    V = np.array([[0.6, 0.4]])
    V_new, T, achieved = adjust.adjust_attributes(V, P, H)
    losses = [np.linalg.norm(H[0] - P @ fap_oracle(V[0], t)) for t in GRID]
    assert achieved[0] == pytest.approx(min(losses), abs=1e-12)
    assert T[0] == GRID[int(np.argmin(losses))]
    np.testing.assert_allclose(V_new[0], fap_oracle(V[0], T[0]), atol=1e-12)


def test_attribute_fixed_points():
    P = np.array([[0.9, 0.1], [0.1, 0.9]])
    V = np.array([[0.5, 0.5]])
    V_new, T, achieved = adjust.adjust_attributes(V, P, (P @ V[0])[None, :])
    np.testing.assert_allclose(V_new, V)
    assert achieved[0] < 1e-12
    # all-zero rows stay zero
    V_new, _, _ = adjust.adjust_attributes(np.zeros((1, 2)), P, np.zeros((1, 2)))
    assert not V_new.any()
