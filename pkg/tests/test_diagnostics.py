import numpy as np
import pytest
from scipy.integrate import quad

from chlab import mollifier
from chlab.diagnostics import PHI_SQUARED_INTEGRAL, TestFamily, auto_probes, compare_eulerian, compare_lagrangian
from chlab.eulerian import EulerianState, mollify
from chlab.grid import Grid
from chlab.lagrangian import RelabelingFunction, compose
from chlab.reference import peakon_antipeakon, peakon_antipeakon_breaking
from chlab.transforms import lift, project
from factories import random_eulerian


def test_phi_squared_integral():
    ref = quad(lambda x: mollifier.phi(x) ** 2, -1, 1, epsabs=1e-15)[0]
    assert PHI_SQUARED_INTEGRAL == pytest.approx(ref, rel=1e-12)


def test_default_family_has_sixteen_bumps():
    fam = TestFamily.default_for(0.0, 8.0)
    assert np.allclose(fam.centers, (1.6, 3.2, 4.8, 6.4))
    assert np.allclose(fam.widths, (2.0, 1.0, 0.5, 0.25))
    assert fam.pairings(np.linspace(0, 8, 9), np.zeros(8)).shape == (16,)


def test_pairing_of_constant_is_bump_mass():
    fam = TestFamily((0.0,), (0.5,))
    nodes = np.linspace(-2, 2, 401)
    got = fam.pairings(nodes, np.ones(400))[0]
    assert got == pytest.approx(0.5 / np.sqrt(0.5 * PHI_SQUARED_INTEGRAL), rel=1e-13)


def test_self_comparison_is_zero():
    s = random_eulerian(np.random.default_rng(0), cells=256)
    r = compare_eulerian(s, s)
    assert all(v == 0.0 for v in r.fields().values())
    assert all(e == 0.0 for _, e in r.F_pointwise_errs)


def test_probe_on_an_atom_is_rejected():
    s = peakon_antipeakon_breaking(2.0, Grid.spanning(-2, 2, 100))
    with pytest.raises(ValueError, match="atom"):
        compare_eulerian(s, s, probes=[0.0])


def test_auto_probes_avoid_atoms():
    g = Grid.spanning(-4, 4, 80)
    s = EulerianState.from_u(g, np.zeros(81), atoms=[(0.0, 1.0), (1.0, 0.5)])
    probes = auto_probes(s, s)
    assert probes == [-2.0, 0.5, 2.0]


def test_mollified_atom_F_errors_shrink():
    s = peakon_antipeakon_breaking(2.0, Grid.spanning(-2, 2, 400))
    errs = []
    for n in (4, 8, 16, 32):
        r = compare_eulerian(s, mollify(s, n), probes=[-0.5, 0.5])
        errs.append(max(e for _, e in r.F_pointwise_errs))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_grad_ratio_of_mollified_pair_approaches_target():
    g = Grid.spanning(-16, 16, 3200)
    s = peakon_antipeakon(2.0, 1.0, 0.0, g)
    errs = [compare_eulerian(s, mollify(s, n), probes=[-0.5, 0.5]).grad_ratio_err for n in (4, 16, 64)]
    assert errs[-1] < errs[0] and errs[-1] < 0.05


def test_report_json_mirrors_fields():
    s = random_eulerian(np.random.default_rng(1), cells=128)
    r = compare_eulerian(s, s, probes=[0.123])
    d = r.to_json()
    assert set(d) == {"u_l2_err", "u_linf_err", "weak_ux_err", "weak_rhobar_err", "k_err",
                      "grad_ratio_err", "rho_ratio_err", "F_pointwise_errs", "F_total_err"}
    assert d["F_pointwise_errs"] == [[0.123, 0.0]]


def test_compare_lagrangian():
    X = lift(random_eulerian(np.random.default_rng(2), cells=256))
    assert compare_lagrangian(X, X) == 0.0
    g = RelabelingFunction.from_callable(X.grid, lambda xi: xi + 0.2 * np.exp(-xi**2))
    Y = compose(X, g)
    assert compare_lagrangian(X, Y) > 0
    a, b = project(X), project(Y, require_F0=False, grid=project(X).grid)
    assert compare_eulerian(a, b).F_total_err < 1e-10


def test_lifted_mollified_sequence_converges_in_E():
    g = Grid.spanning(-16, 16, 1600)
    s = peakon_antipeakon(2.0, 1.0, 0.0, g)
    X = lift(s, cells=4096)
    dists = []
    for n in (2, 8, 32):
        Xn = lift(mollify(s, n), grid=X.grid)
        dists.append(compare_lagrangian(Xn, X))
    assert dists[0] > dists[1] > dists[2]
