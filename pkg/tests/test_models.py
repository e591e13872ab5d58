import numpy as np
import pytest

from adialab import numkernel as nk
from adialab.errors import DimMismatch, GridTooCoarse, InvalidParams
from adialab.models import (DrivenTwoLevelParams, driven_two_level, dual_of, grover_adiabatic,
                            landau_zener, linear_interpolation, rotating_field)

SX, SZ = nk.SIGMA_X, nk.SIGMA_Z


def zoo():
    return [
        driven_two_level(DrivenTwoLevelParams(1.0, 0.02, 1.0), 50.0),
        driven_two_level(DrivenTwoLevelParams(1.3, 0.4, 2.1), 10.0),
        rotating_field(1.0, 200.0, 1),
        rotating_field(0.7, 30.0, 3),
        landau_zener(0.1, 100.0),
        linear_interpolation(-0.5 * SZ + 0.3 * nk.SIGMA_Y, 0.5 * SZ + 0.2 * SX, 20.0),
        grover_adiabatic(3, 5, 40.0),
    ]


@pytest.mark.parametrize("model", zoo(), ids=repr)
def test_derivative_matches_central_difference(model):
    rng = np.random.default_rng(0)
    T = model.total_time
    h = 1e-5 * T
    for t in rng.uniform(0.01 * T, 0.99 * T, 10):
        fd = (model.evaluate(t + h) - model.evaluate(t - h)) / (2 * h)
        tol = max(1e-6, 1e-6 * np.max(np.abs(model.evaluate(t))))
        assert np.max(np.abs(fd - model.derivative(t))) <= tol


@pytest.mark.parametrize("model", zoo(), ids=repr)
def test_hermitian_and_batched(model):
    ts = np.linspace(0, model.total_time, 17)
    hs = model.evaluate(ts)
    assert hs.shape == (17, model.dim, model.dim)
    assert np.max(np.abs(hs - np.swapaxes(hs, 1, 2).conj())) <= 1e-12
    np.testing.assert_allclose(hs[5], model.evaluate(ts[5]), atol=1e-15)


@pytest.mark.parametrize("model", zoo(), ids=repr)
def test_with_total_time_keeps_schedule(model):
    longer = model.with_total_time(2 * model.total_time)
    if model.label == "driven_two_level":
        pytest.skip("the driven model is a function of t, not of s")
    np.testing.assert_allclose(longer.h_of_s(0.3), model.h_of_s(0.3), atol=1e-14)
    np.testing.assert_allclose(longer.dh_ds(0.3), model.dh_ds(0.3), atol=1e-12)


def test_driven_examples():
    m = driven_two_level(DrivenTwoLevelParams(1.0, 0.02, 1.0))
    np.testing.assert_allclose(m.evaluate(0.0), -0.5 * SZ, atol=1e-15)
    np.testing.assert_allclose(m.evaluate(np.pi / 2)[0, 1], -0.02, atol=1e-15)
    np.testing.assert_allclose(m.derivative(0.0), -0.02 * SX, atol=1e-15)
    assert m.total_time == pytest.approx(np.pi / 0.02)


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, 0), (1, np.inf, 1)])
def test_driven_rejects_bad_params(bad):
    with pytest.raises(InvalidParams):
        driven_two_level(DrivenTwoLevelParams(*bad))


def test_rotating_field_examples():
    m = rotating_field(1.0, 200.0, 1)
    np.testing.assert_allclose(m.evaluate(0.0), -0.5 * SZ, atol=1e-15)
    np.testing.assert_allclose(m.evaluate(50.0), -0.5 * SX, atol=1e-15)
    e0, eh = nk.eigh(m.evaluate(0.0)), nk.eigh(m.evaluate(100.0))
    assert abs(e0.vectors[:, 0].conj() @ eh.vectors[:, 0]) < 1e-12
    for t in np.linspace(0, 200, 9):
        w = nk.eigh(m.evaluate(t)).values
        assert w[1] - w[0] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidParams):
        rotating_field(1.0, 200.0, 0)


def test_linear_interpolation_examples():
    h0, h1 = -0.5 * SZ, 0.5 * SZ - 0.05 * SX
    m = linear_interpolation(h0, h1, 100.0)
    np.testing.assert_allclose(m.evaluate(0.0), h0)
    np.testing.assert_allclose(m.evaluate(100.0), h1)
    np.testing.assert_allclose(m.evaluate(50.0), [[0, -0.025], [-0.025, 0]], atol=1e-15)
    np.testing.assert_allclose(m.derivative(3.0), (h1 - h0) / 100.0)
    m2 = linear_interpolation(h0, h1, 200.0)
    assert np.linalg.norm(m2.derivative(1.0)) == pytest.approx(0.5 * np.linalg.norm(m.derivative(1.0)))
    with pytest.raises(DimMismatch):
        linear_interpolation(h0, np.eye(3), 1.0)


def test_grover_spectrum():
    m = grover_adiabatic(3, 5, 10.0)
    es0 = nk.eigh(m.h_of_s(0.0))
    np.testing.assert_allclose(es0.values, [0] + [1] * 7, atol=1e-12)
    assert abs(es0.vectors[:, 0] @ np.full(8, 1 / np.sqrt(8))) == pytest.approx(1, abs=1e-12)
    es1 = nk.eigh(m.h_of_s(1.0))
    assert es1.values[0] == pytest.approx(0, abs=1e-10)
    assert abs(es1.vectors[5, 0]) == pytest.approx(1, abs=1e-12)
    s = np.linspace(0, 1, 10001)
    w, _ = nk.eigh_batch(m.h_of_s(s))
    assert np.all(w[:, 0] <= w[:, 1:].min(axis=1))
    k = np.argmin(w[:, 1] - w[:, 0])
    assert w[k, 1] - w[k, 0] == pytest.approx(1 / np.sqrt(8), abs=1e-6)
    assert s[k] == pytest.approx(0.5, abs=1e-4)


@pytest.mark.parametrize("n,marked", [(0, 0), (7, 0), (2, 4), (2, -1)])
def test_grover_rejects(n, marked):
    with pytest.raises(InvalidParams):
        grover_adiabatic(n, marked, 1.0)


@pytest.fixture(scope="module")
def rotating_dual():
    base = rotating_field(1.0, 200.0, 1)
    return base, dual_of(base, 20001)  # the grid of scenario S2


def test_dual_at_zero_is_negated_base(rotating_dual):
    base, dual = rotating_dual
    np.testing.assert_allclose(dual.evaluate(0.0), -base.evaluate(0.0), atol=1e-15)


def test_dual_spectral_flip(rotating_dual):
    base, dual = rotating_dual
    ts = dual.times[::500]
    wb, vb = nk.eigh_batch(base.evaluate(ts))
    wd, vd = nk.eigh_batch(dual.evaluate(ts))
    np.testing.assert_allclose(wd, -wb[:, ::-1], atol=1e-8)
    # dual ground state is U^dagger applied to the base's top level
    u = dual.propagators[::500]
    mapped = np.einsum("kji,kj->ki", u.conj(), vb[:, :, -1])
    ov = np.abs(np.einsum("ki,ki->k", vd[:, :, 0].conj(), mapped))
    assert np.min(ov) >= 1 - 1e-6


def test_dual_off_grid_and_derivative(rotating_dual):
    _, dual = rotating_dual
    t = 0.5 * (dual.times[10] + dual.times[11])
    h = dual.evaluate(t)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12
    step = 1e-5 * dual.total_time
    for t in np.random.default_rng(1).uniform(5, 195, 10):
        fd = (dual.evaluate(t + step) - dual.evaluate(t - step)) / (2 * step)
        assert np.max(np.abs(fd - dual.derivative(t))) <= 1e-6


def test_dual_guards():
    base = rotating_field(1.0, 200.0, 1)
    with pytest.raises(GridTooCoarse):
        dual_of(base, 100)
    with pytest.raises(InvalidParams):
        dual_of(dual_of(base, 4001), 4001)
    with pytest.raises(InvalidParams):
        dual_of(base, 1)
