import cmath
import math

import numpy as np
import pytest

import qcd_duality as q


def test_r_matrix_at_eta():
    eta = 0.5
    r = q.r_matrix(eta, eta)
    assert r.shape == (4, 4)
    assert r[0, 0] == pytest.approx(math.sinh(2 * eta) / math.sinh(eta))
    assert r[3, 3] == pytest.approx(r[0, 0])


def test_r_matrix_singular_point_raises():
    with pytest.raises(q.Error):
        q.r_matrix(0.0, 0.5)


def test_duality_on_a_random_chain():
    chain = q.draw_chain(3, 3)
    out = q.verify_duality(chain["eta"], chain["h"], chain["inhom"])
    assert out["n_states"] == 8
    assert out["worst_error"] <= 1e-8
    for state in out["states"]:
        ev = sorted(state["lax_eigenvalues"], key=lambda z: (z.real, z.imag))
        pred = sorted(state["predicted"], key=lambda z: (z.real, z.imag))
        assert np.allclose(ev, pred, rtol=1e-8, atol=0)


def test_strings_at_one_site():
    h, eta = 0.3, 0.5
    assert q.predicted_strings(1, 0, h, eta)[0] == pytest.approx(math.exp(h))
    assert q.predicted_strings(1, 1, h, eta)[0] == pytest.approx(math.exp(-h))


def test_bethe_counts_at_three_sites():
    chain = q.draw_chain(5, 3)
    for m2, count in enumerate([1, 3, 3, 1]):
        sols = q.solve_bae(chain["eta"], chain["h"], chain["inhom"], m2, seed=m2)
        assert len(sols) == count
        assert all(s["residual"] <= 1e-10 for s in sols)


def test_free_particle_and_lax():
    out = q.rs_evolve(0.5, [0.0], [0.2], 1.0)
    assert out["t"][-1] == pytest.approx(1.0)
    v = -0.5 * math.exp(0.5 * 0.2)
    assert q.lax_from_momenta(0.5, [0.0], [0.2])[0, 0] == pytest.approx(v)
    assert out["spectral_drift"] <= 1e-10


def test_lemma():
    assert q.verify_lemma1([0.1, 0.9, 1.6], [0.35], cmath.exp(0.2j), 0.5) <= 1e-10


def test_run_command_and_determinism():
    cfg = {"L": 3, "seed": 9, "trials": 2}
    code, report, _ = q.run_command("verify-duality", cfg)
    assert code == 0
    assert list(report) == ["schema_version", "command", "config", "results", "summary", "timestamp"]
    _, again, _ = q.run_command("verify-duality", cfg)
    assert q.payload(report) == q.payload(again)


def test_run_command_config_error():
    code, report, message = q.run_command("verify-duality", {"colour": 1})
    assert code == 2
    assert "colour" in message
