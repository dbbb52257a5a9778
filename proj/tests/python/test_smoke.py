import math

import numpy as np
import pytest

import sscopic


def test_theorem4_anchor():
    assert sscopic.theorem4_smax(0.4)["S"] == 5.0


def test_tmss_inference_and_moments():
    gain, var = sscopic.tmss_inference(1.0)
    assert var == pytest.approx(1.0 / math.cosh(2.0), rel=1e-12)
    assert gain == pytest.approx(-math.tanh(2.0), rel=1e-12)
    mean, variance = sscopic.moments("cat:0.5", "p")
    assert variance == pytest.approx(1.0 - math.exp(-1.0), abs=1e-12)


def test_samples_are_seeded():
    a = sscopic.sample("squeezed:1", "x", 1000, seed=3)
    assert a == sscopic.sample("squeezed:1", "x", 1000, seed=3)
    assert np.var(sscopic.sample("squeezed:1", "x", 200000, seed=4)) == pytest.approx(math.exp(2.0), rel=0.02)


def test_smax_of_squeezed_state():
    out = sscopic.smax("squeezed:2", "theorem1-product")
    assert out["s_max"] / math.exp(2.0) == pytest.approx(0.5, abs=0.02)


def test_analyze_matches_cli_shape():
    x = sscopic.sample("squeezed:1", "x", 20000, seed=1)
    p = sscopic.sample("squeezed:1", "p", 20000, seed=2)
    cfg = {"mode": "single", "s_grid": "0.5:4:8", "bootstrap_replicas": 40, "seed": 7}
    rep = sscopic.analyze(cfg, x, p)
    assert list(rep)[:3] == ["tool", "version", "config"]
    assert [c["criterion"] for c in rep["criteria"]][0] == "theorem1-product"
    assert rep == sscopic.analyze(cfg, x, p)


def test_inference_mode_with_joint_samples():
    x = sscopic.sample("tmss:1", "x", 50000, seed=1)
    joint = sscopic.sample_joint_p("tmss:1", 50000, seed=2)
    rep = sscopic.analyze({"mode": "bipartite-inference", "s_grid": "0.5:4:8", "bootstrap_replicas": 30}, x, joint=joint)
    t5 = [c for c in rep["criteria"] if c["criterion"] == "theorem5a"][0]
    assert t5["results"][0]["S"] == pytest.approx(2.0 * math.sqrt(math.cosh(2.0)), rel=0.03)


def test_curve_and_verify():
    header, rows = sscopic.curve("fig8", 0.1, 1.0, 10)
    assert header == ["alpha", "var_p"]
    assert len(rows) == 10
    assert sscopic.verify("grid")["failures"] == []


def test_decompose_incoherent_mixture():
    rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
    d = sscopic.decompose(rho, 0, 1)
    assert d["w1"] + d["w2"] == pytest.approx(1.0)
    assert d["reconstruction_error"] < 1e-12


def test_errors_carry_category_codes():
    with pytest.raises(sscopic.SscopicError) as info:
        sscopic.smax("squeezed:1", "theorem2")
    assert info.value.code == 13
    with pytest.raises(sscopic.SscopicError) as info:
        sscopic.analyze({"mode": "single"}, [0.1, 0.2, 0.3])
    assert info.value.category == "mode-mismatch"
