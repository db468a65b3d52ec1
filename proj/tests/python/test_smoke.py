import math

import numpy as np
import pytest

import bclab


def test_presets_and_forward():
    assert "flat-interval" in bclab.presets()
    m = bclab.manifold("flat-interval", {"N": 1025})
    d = bclab.forward(m, 6)
    assert d.K == 6
    assert np.allclose(d.eigenvalues, np.arange(6) ** 2, rtol=1e-4, atol=1e-9)


def test_data_round_trip(tmp_path):
    m = bclab.manifold("warped-rectangle", {"nx": 10, "ny": 10})
    d = bclab.forward(m, 8)
    path = str(tmp_path / "d.bclab")
    bclab.write_data(d, path)
    r = bclab.read_data(path)
    assert np.array_equal(r.traces, d.traces)
    assert np.array_equal(r.eigenvalues, d.eigenvalues)


def test_errors_surface_as_exceptions(tmp_path):
    with pytest.raises(bclab.BclabError):
        bclab.read_data(str(tmp_path / "missing.bclab"))
    with pytest.raises(bclab.BclabError):
        bclab.manifold("no-such-preset")


def test_synthesis_matches_direct_solver():
    m = bclab.manifold("flat-interval", {"N": 512})
    c = bclab.compare_synthesis(m, 60, t=1.0, t0=0.1, t1=0.5)
    assert c["mismatch"] < 1e-2


def test_wave_span_gauge_invariance():
    m = bclab.manifold("flat-interval", {"N": 512})
    d = bclab.forward(m, 40)
    mixed = bclab.perturb(d, mix=True, seed=4)
    assert bclab.spectral_data_distance(d, mixed) < 1e-8
    a = bclab.wave_span(d, [0], 1.0)
    b = bclab.wave_span(mixed, [0], 1.0)
    assert a.shape == b.shape
    # 1D clusters are simple, so mixing only flips row signs; the projector diagonal is invariant
    assert np.allclose(np.diag(a @ a.T), np.diag(b @ b.T), atol=1e-8)


def test_detection_on_interval():
    d = bclab.forward(bclab.manifold("flat-interval", {"N": 512}), 80)
    ok, _ = bclab.is_boundary_distance(d, np.array([1.0, math.pi - 1.0]))
    bad, _ = bclab.is_boundary_distance(d, np.array([1.3, math.pi - 0.7]))
    assert ok and not bad


def test_branching_witness():
    w = bclab.branching_witness("power", 1)
    assert w["branch_residual"] < 1e-6
    assert abs(w["separation_at_end"] - 1.0) < 1e-9


def test_spearman():
    assert bclab.spearman([1, 2, 3], [2, 4, 9]) == pytest.approx(1.0)
