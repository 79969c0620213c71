import math

import numpy as np
import pytest

import scheq


def test_spec_and_drift():
    s = scheq.NonlinSpec.parse("power:2")
    assert s.alpha == 2.0 and s.label == "power:2"
    assert scheq.f_reg(scheq.NonlinSpec.log(), 2, 0.0) == pytest.approx(math.log(2.0))
    v = scheq.f_reg(s, 4, np.array([-1.0, 0.0, 1.0]))
    assert v == pytest.approx([16.0, 16.0, 1 / 1.25**2])
    assert scheq.lipschitz(s, 8) == 1024.0


def test_transform_round_trip():
    rng = np.random.default_rng(0)
    c = rng.normal(size=16)
    g = scheq.to_grid(c, 64)
    theta = (np.arange(64) + 0.5) / 64
    basis = np.vstack([np.ones(64)] + [math.sqrt(2) * np.cos(i * math.pi * theta) for i in range(1, 16)])
    assert g == pytest.approx(c @ basis, abs=1e-12)
    assert scheq.to_spectral(g, 16) == pytest.approx(c, abs=1e-12)


def test_simulate_conserves_mean_and_is_reproducible():
    x0 = np.zeros(64)
    x0[0] = 2.0
    x0[1] = 0.3
    t, s = scheq.simulate(x0, dt=1e-4, T=0.01, seed=3, stride=10)
    assert s.shape == (11, 64)
    assert np.all(s[:, 0] == 2.0)
    t2, s2 = scheq.simulate(x0, dt=1e-4, T=0.01, seed=3, stride=10)
    assert np.array_equal(s, s2)
    with pytest.raises(ValueError):
        scheq.simulate(x0, dt=1e-2, T=0.1, spec=scheq.NonlinSpec.power(2), n=8)


def test_samplers():
    y = scheq.sample_mu_c(1.5, 128, seed=2)
    assert y.mean() == pytest.approx(1.5, abs=1e-12)
    t, v, w = scheq.sample_meander(9, seed=2)
    assert t[0] == 0.0 and t[-1] == 1.0 and v[0] == 0.0
    assert np.all(v[1:] > 0) and w > 0
    z = scheq.estimate_Z(2.0, scheq.NonlinSpec.log(), 8, 2000, M=32)
    assert 0.0 < z["value"] <= 1.0


def test_generator_and_defect():
    x = np.zeros(64)
    x[:3] = [2.0, 0.5, 0.3]
    h = np.zeros(64)
    h[1] = 1.0
    L = scheq.generator_apply(h, x, scheq.NonlinSpec.log(), 4)
    assert L.real == pytest.approx(0.07963923183063587, rel=1e-10)
    assert L.imag == pytest.approx(-2.5710982162908085, rel=1e-10)
    d = scheq.ibp_defect(np.array([1.0, 0.0, 0.0]), 2.0, scheq.NonlinSpec.power(1), 300, M=32)
    assert d["estimate"]["value"] == 0.0
    assert scheq.contact_bound(scheq.NonlinSpec.log(), 0.01, 1.0) == pytest.approx(0.01 * math.log(100))
