import math
import os
import tempfile

import pytest

import otlab


def uniform_interval(lo, hi, h):
    n = round((hi - lo) / h)
    spec = otlab.GridSpec([lo], h, [n])
    return otlab.GridMeasure(spec, [1.0] * n).normalized()


def test_wp_dirac():
    a = otlab.DiscreteMeasure(1, [0.0], [1.0])
    b = otlab.DiscreteMeasure(1, [1.0], [1.0])
    assert otlab.wp_1d(a, b, otlab.CostConvention(2.0, True)) == pytest.approx(0.5)
    assert otlab.wp_1d(a, b, otlab.CostConvention(2.0, False)) == pytest.approx(1.0)


def test_solve_invariants():
    lam = uniform_interval(0.0, 1.0, 1.0 / 32)
    mu = uniform_interval(1.0, 2.0, 1.0 / 32)
    sol = otlab.solve(
        otlab.lower_to_discrete(lam),
        otlab.lower_to_discrete(mu),
        otlab.CostConvention(2.0, False),
    )
    assert sol.cost == pytest.approx(1.0)
    assert abs(sol.duality_gap) <= 1e-6 * (1 + sol.cost)
    assert sum(arc.mass for arc in sol.plan) == pytest.approx(1.0)


def test_contraction_and_rigidity():
    lam = uniform_interval(0.0, 1.0, 1.0 / 32)
    mu = uniform_interval(0.25, 1.25, 1.0 / 32)
    conv = otlab.CostConvention(2.0, True)
    rep = otlab.delta_eps(lam, mu, otlab.Kernel("uniform", 0.1), conv)
    assert rep.delta >= -(rep.gap_sum + 1e-12)
    assert abs(rep.delta) <= 1e-6 + rep.gap_sum  # exact translate

    z, residual = otlab.recover_translation(lam, mu, conv)
    assert z[0] == pytest.approx(-0.25)
    assert residual <= 1e-6


def test_convolve_preserves_mass():
    lam = uniform_interval(0.0, 1.0, 1.0 / 64)
    smoothed = otlab.convolve(lam, otlab.Kernel("gauss", 0.04))
    assert smoothed.total_mass() == pytest.approx(1.0)


def test_gaussian_closed_form():
    g = otlab.delta_eps_gaussian_closed_form(2.0, 0.04, 1)
    assert g.f == pytest.approx(0.16387, abs=1e-4)
    assert g.delta == pytest.approx(g.f * 1.0 * (1 - 2.0) ** 2, abs=1e-12)


def test_grid_measure_roundtrip(tmp_path):
    lam = uniform_interval(0.0, 1.0, 0.25)
    path = str(tmp_path / "m.grid")
    lam.save(path)
    back = otlab.GridMeasure.load(path)
    assert back.weights == lam.weights


def test_run_experiment_and_statuses(tmp_path):
    cfg = tmp_path / "c.cfg"
    out = tmp_path / "out"
    cfg.write_text(
        "experiment = contract\nlambda = uniform1d:0,1\nmu = uniform1d:0.5,1.5\n"
        f"h = 0.05\np = 2\nkernel = uniform\neps = 0.1\noutput = {out}\n"
    )
    assert otlab.run_experiment(str(cfg)) == 0
    assert (out / "contract.csv").exists()
    assert (out / "MANIFEST").exists()

    bad = tmp_path / "bad.cfg"
    bad.write_text("experiment = nonsense\n")
    assert otlab.run_experiment(str(bad)) == 2


def test_plot(tmp_path):
    csv = tmp_path / "d.csv"
    csv.write_text("x,y\n1,1\n2,4\n3,9\n")
    svg = tmp_path / "d.svg"
    assert otlab.plot_csv(str(csv), "x", "y", str(svg), True) == 0
    assert "<svg" in svg.read_text()
    assert otlab.plot_csv(str(csv), "x", "zzz", str(svg), False) == 2
