import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chlab.grid import Grid
from chlab.measure import CumulativeMeasure, merge_atoms, pushforward
from oracles import bisection_sup_inverse


@pytest.fixture
def grid():
    return Grid.spanning(-2.0, 2.0, 40)


def unit_density():
    g = Grid.spanning(0.0, 1.0, 10)
    return CumulativeMeasure(g, np.ones(10))


@st.composite
def measures(draw):
    cells = draw(st.integers(4, 40))
    g = Grid.spanning(-3.0, 3.0, cells)
    dens = np.array(draw(st.lists(st.floats(0.0, 3.0), min_size=cells, max_size=cells)))
    n_atoms = draw(st.integers(0, 3))
    ax = draw(st.lists(st.floats(-4.0, 4.0), min_size=n_atoms, max_size=n_atoms))
    am = draw(st.lists(st.floats(0.01, 2.0), min_size=n_atoms, max_size=n_atoms))
    return CumulativeMeasure(g, dens, ax, am)


# --- grid ---------------------------------------------------------------

def test_grid_spanning_and_json():
    g = Grid.spanning(-1.0, 3.0, 8)
    assert g.dx == 0.5 and g.x1 == 3.0
    assert np.allclose(g.nodes, np.linspace(-1, 3, 9))
    assert Grid.from_json(g.to_json()) == g


def test_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        Grid(0.0, 0.0, 4)
    with pytest.raises(ValueError):
        Grid.spanning(1.0, 1.0, 4)


def test_with_spacing_never_exceeds_max_dx():
    g = Grid.with_spacing(0.0, 1.0, 0.3)
    assert g.cells == 4 and g.dx <= 0.3


# --- eval_F ---------------------------------------------------------------

def test_atom_cumulative(grid):
    mu = CumulativeMeasure.atom(grid, 0.0, 2.0)
    assert mu.eval_F(-0.1) == 0.0
    assert mu.eval_F(0.0) == 2.0
    assert mu.eval_F_left(0.0) == 0.0
    assert mu.eval_F(np.inf) == 2.0


def test_zero_measure(grid):
    mu = CumulativeMeasure.zero(grid)
    assert np.all(mu.eval_F(np.linspace(-5, 5, 11)) == 0.0)
    assert mu.total_mass == 0.0


def test_uniform_density():
    assert unit_density().eval_F(0.5) == pytest.approx(0.5, abs=1e-15)


def test_left_limit_sums_strictly_left_mass(grid):
    mu = CumulativeMeasure(grid, np.zeros(grid.cells), [0.0, 1.0], [2.0, 1.0])
    assert mu.eval_F_left(1.0) == 2.0
    assert mu.eval_F(1.0) == 3.0
    # away from atoms the two agree
    assert mu.eval_F_left(0.5) == mu.eval_F(0.5)


def test_close_atoms_are_merged():
    x, m = merge_atoms([1.0, 1.0 + 1e-12, 2.0], [1.0, 0.5, 1.0], 1e-9)
    assert np.allclose(x, [1.0, 2.0]) and np.allclose(m, [1.5, 1.0])


def test_rejects_negative_density(grid):
    with pytest.raises(ValueError):
        CumulativeMeasure(grid, -np.ones(grid.cells))


def test_json_round_trip(grid):
    mu = CumulativeMeasure(grid, np.linspace(0, 1, grid.cells), [0.3], [0.7])
    back = CumulativeMeasure.from_json(mu.to_json())
    assert np.array_equal(back.density, mu.density)
    assert np.array_equal(back.atom_x, mu.atom_x) and np.array_equal(back.atom_m, mu.atom_m)


@settings(max_examples=60, deadline=None)
@given(measures())
def test_F_nondecreasing_and_total(mu):
    x = np.linspace(-5, 5, 501)
    F = mu.eval_F(x)
    assert np.all(np.diff(F) >= -1e-14)
    assert mu.eval_F(10.0) == pytest.approx(mu.atom_m.sum() + mu.density.sum() * mu.grid.dx, rel=1e-14, abs=1e-14)


# --- sup_inverse --------------------------------------------------------

def test_atom_characteristic(grid):
    mu = CumulativeMeasure.atom(grid, 0.0, 2.0)
    xi = np.array([-1.0, -1e-9, 0.0, 0.7, 2.0, 3.0])
    assert np.allclose(mu.sup_inverse(xi), [-1.0, -1e-9, 0.0, 0.0, 0.0, 1.0], rtol=1e-15, atol=1e-16)


def test_zero_measure_is_identity(grid):
    xi = np.linspace(-4, 4, 17)
    assert np.allclose(CumulativeMeasure.zero(grid).sup_inverse(xi), xi, atol=1e-15)


def test_uniform_density_inverse_matches_bisection():
    mu = unit_density()
    assert mu.sup_inverse(1.0) == pytest.approx(0.5, abs=1e-15)
    assert bisection_sup_inverse(mu, 1.0) == pytest.approx(0.5, abs=1e-13)


@settings(max_examples=60, deadline=None)
@given(measures(), st.lists(st.floats(-8.0, 12.0), min_size=1, max_size=20))
def test_sup_inverse_matches_bisection_and_brackets(mu, xis):
    xi = np.array(xis)
    y = mu.sup_inverse(xi)
    for a, b in zip(xi, y):
        assert b == pytest.approx(bisection_sup_inverse(mu, a), abs=1e-12 * (1 + abs(a)))
        assert mu.eval_F_left(b) + b <= a + 1e-12 * (1 + abs(a))
        assert a <= mu.eval_F(b) + b + 1e-12 * (1 + abs(a))


@settings(max_examples=40, deadline=None)
@given(measures(), st.floats(-8, 12), st.floats(-8, 12))
def test_sup_inverse_is_one_lipschitz_and_monotone(mu, a, b):
    ya, yb = mu.sup_inverse(a), mu.sup_inverse(b)
    assert abs(ya - yb) <= abs(a - b) + 1e-12
    if a <= b:
        assert ya <= yb + 1e-14


# --- pushforward --------------------------------------------------------

def test_identity_pushforward():
    g = Grid.spanning(0.0, 1.0, 10)
    mu = pushforward(np.full(10, 0.3), g, g.nodes, grid=g)
    assert np.allclose(mu.density, 0.3) and mu.atom_x.size == 0


def test_plateau_becomes_atom():
    g = Grid.spanning(0.0, 2.0, 8)
    mu = pushforward(np.ones(8), g, np.zeros(9), grid=Grid.spanning(-1, 1, 4))
    assert np.allclose(mu.atom_x, [0.0]) and np.allclose(mu.atom_m, [2.0])
    assert mu.ac_mass == 0.0


def test_zero_h_gives_zero_measure():
    g = Grid.spanning(0.0, 1.0, 10)
    assert pushforward(np.zeros(10), g, g.nodes).total_mass == 0.0


def test_rejects_negative_h():
    g = Grid.spanning(0.0, 1.0, 4)
    with pytest.raises(ValueError, match="negative"):
        pushforward(np.array([1.0, -1.0, 0.0, 0.0]), g, g.nodes)


@settings(max_examples=50, deadline=None)
@given(st.integers(4, 60), st.data())
def test_pushforward_preserves_mass(cells, data):
    g = Grid.spanning(0.0, 1.0, cells)
    h = np.array(data.draw(st.lists(st.floats(0, 5), min_size=cells, max_size=cells)))
    steps = np.array(data.draw(st.lists(st.sampled_from([0.0, 0.5, 1.0, 2.0]), min_size=cells, max_size=cells)))
    y = np.concatenate([[0.0], np.cumsum(steps) * g.dx])
    mu = pushforward(h, g, y)
    assert mu.total_mass == pytest.approx(h.sum() * g.dx, rel=1e-12, abs=1e-12)


def test_measure_round_trip_through_characteristic():
    # push h = 1 - y_xi forward along y = sup_inverse(mu) and recover F at the nodes
    g = Grid.spanning(-2.0, 2.0, 80)
    x = g.centers
    mu = CumulativeMeasure(g, np.exp(-x**2), [0.25], [0.5])
    xi_grid = Grid.spanning(g.x0, g.x1 + mu.total_mass, 2000)
    y = mu.sup_inverse(xi_grid.nodes)
    h = 1.0 - np.diff(y) / xi_grid.dx
    back = pushforward(h, xi_grid, y, grid=g)
    # the atom's edge cells are only partly flat, so up to two cells of mass leak into the ac part
    assert np.allclose(back.eval_F(g.nodes), mu.eval_F(g.nodes), atol=2 * xi_grid.dx)
    assert back.total_mass == pytest.approx(mu.total_mass, abs=1e-12)
