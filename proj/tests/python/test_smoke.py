import math

import pytest

import nldelta


def test_linear_single_delta():
    (branch,) = nldelta.solve_scattering([(0.0, 2.0, 0.0)], k=1.0)
    assert branch.T2 == pytest.approx(0.5, abs=1e-12)
    assert branch.T2 + branch.R2 == pytest.approx(1.0, abs=1e-12)


def test_kerr_matches_closed_form_and_oracle():
    y = 0.6823278038280193  # y^3 + y - 1 = 0
    gs = nldelta.solve_scattering([(0.0, 2.0, 2.0)], k=1.0)
    cf = nldelta.single_delta_closed_form(2.0, 2.0, 1.0)
    ob = nldelta.oracle_branches([(0.0, 2.0, 2.0)], k=1.0)
    assert len(gs) == len(cf) == len(ob) == 1
    for t2 in (gs[0].T2, cf[0].T2, ob[0].T2):
        assert t2 == pytest.approx(1.0 / (1.0 + y * y), abs=1e-10)


def test_complex_coupling_and_right_incidence():
    centers = [(-1.0, 1j, 2.0), (0.0, 1j, 2.0), (1.0, 1j, 2.0)]
    left = nldelta.solve_scattering(centers, k=1.1)
    right = nldelta.solve_scattering(centers, k=1.1, incidence="right")
    assert sorted(b.T2 for b in left) == pytest.approx(sorted(b.T2 for b in right), abs=1e-10)


def test_errors_map_to_python_exceptions():
    with pytest.raises(nldelta.ValidationError):
        nldelta.solve_scattering([(0.0, 2.0, 0.0)], k=-1.0)
    with pytest.raises(nldelta.NoBranchError):
        nldelta.solve_scattering([(0.0, 20.0, -1.0)], k=1.0)
    with pytest.raises(nldelta.DomainError):
        nldelta.solve_single_bound(2.0, 2.0)
    assert issubclass(nldelta.NoBranchError, nldelta.Error)


def test_bound_states():
    assert nldelta.solve_single_bound(2.0, 0.0).energy == pytest.approx(-1.0, abs=1e-12)
    states = nldelta.solve_symmetric_double(2.0, 0.0, 3.0)
    assert [s.parity for s in states] == ["odd", "even"]
    method, found, notes = nldelta.solve_bound([(-1.5, 2.0, 0.0), (1.5, 2.0, 0.0)])
    assert method == "symmetric-lambert-w"
    assert [s.nu for s in found] == pytest.approx([s.nu for s in states], abs=1e-14)
    assert len(notes) == 2


def test_lambert_w():
    assert nldelta.lambert_w(math.e) == pytest.approx(1.0, abs=1e-15)
    w = nldelta.lambert_w(-0.1, -1)
    assert w * math.exp(w) == pytest.approx(-0.1, rel=1e-13)
    assert w < -1.0


def test_sweep_and_validate():
    assert "fig1-strong" in nldelta.preset_names()
    res = nldelta.sweep_preset("fig1-linear", n=10)
    assert len(res["k"]) == 10
    assert all(b == 0 for b in res["branch"])
    rep = nldelta.validate(size=5)
    assert rep["passed"]
    assert rep["problems"] == 5
