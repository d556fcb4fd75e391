import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ugrm_gft import (
    BandlimitedDenoiser,
    GraphFourierTransform,
    UGRMGridSearch,
    bandlimit_reconstruct_I,
    unvec,
    vec,
)
from ugrm_gft.gft import build_basis_product
from ugrm_gft.graph import ProductShape, UgrmParams

from conftest import random_digraph


@pytest.fixture
def pair(rng):
    return random_digraph(rng, 3), random_digraph(rng, 4)


def test_get_params_and_clone(pair):
    g1, g2 = pair
    est = GraphFourierTransform(g1, g2, alpha=0.2, k=0.9, variant="II")
    params = est.get_params()
    assert params["alpha"] == 0.2 and params["variant"] == "II"
    c = clone(est)
    assert c.get_params()["k"] == 0.9
    est.set_params(alpha=0.7)
    assert est.alpha == 0.7


@pytest.mark.parametrize("variant", ["I", "II"])
def test_transform_roundtrip(pair, rng, variant):
    g1, g2 = pair
    X = rng.standard_normal((5, 12))
    est = GraphFourierTransform(g1, g2, alpha=0.3, k=0.4, variant=variant).fit(X)
    Z = est.transform(X)
    assert Z.shape == (5, 24)
    np.testing.assert_allclose(np.linalg.norm(Z, axis=1), np.linalg.norm(X, axis=1), rtol=1e-10)
    np.testing.assert_allclose(est.inverse_transform(Z), X, atol=1e-10)
    assert np.all(np.diff(est.frequencies_) >= 0)


def test_not_fitted(pair):
    with pytest.raises(NotFittedError):
        GraphFourierTransform(*pair).transform(np.zeros((1, 12)))


def test_wrong_feature_count(pair):
    est = GraphFourierTransform(*pair).fit()
    with pytest.raises(ValueError, match="features"):
        est.transform(np.zeros((1, 11)))


def test_invalid_params(pair):
    with pytest.raises(ValueError):
        GraphFourierTransform(*pair, alpha=2.0).fit()
    with pytest.raises(ValueError):
        GraphFourierTransform(*pair, variant="III").fit()
    with pytest.raises(ValueError):
        BandlimitedDenoiser(*pair, n_components=13).fit()


def test_denoiser_matches_function(pair, rng):
    g1, g2 = pair
    x = rng.standard_normal((4, 3))
    den = BandlimitedDenoiser(g1, g2, alpha=0.3, k=0.6, n_components=5).fit()
    expected = bandlimit_reconstruct_I(build_basis_product(g1, g2, UgrmParams(0.3, 0.6)), x, 5)
    out = den.transform(vec(x)[None, :])
    np.testing.assert_allclose(unvec(out[0], ProductShape(3, 4)), expected, atol=1e-12)


def test_denoiser_full_band_identity_and_score(pair, rng):
    X = rng.standard_normal((3, 12))
    den = BandlimitedDenoiser(*pair, matrix="L").fit()
    np.testing.assert_array_equal(den.transform(X), X)
    assert den.score(X + 0.1, X) > 0


def test_grid_search_estimator(pair, rng):
    g1, g2 = pair
    x = rng.standard_normal((4, 3))
    gs = UGRMGridSearch(
        g1, g2, alpha_values=(0.0, 0.5), k_values=(1.0,), m_values=(0, 6, 12),
        noise_sigma=0.2, trials=2,
    ).fit(x)
    assert set(gs.best_params_) == {"alpha", "k", "n_components"}
    assert gs.best_score_ == gs.report_.best.score
    assert gs.transform(vec(x)[None, :]).shape == (1, 12)
    assert clone(gs).get_params()["trials"] == 2
