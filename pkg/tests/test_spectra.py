import numpy as np
import pytest

from fractal_spectra.errors import IndexOutOfRange, NonpositiveMass, NotSymmetric, SizeCapExceeded, UnknownName
from fractal_spectra.lattice import BlowupWord, build_level
from fractal_spectra.operator import assemble_level
from fractal_spectra.spectra import (
    PointMeasure,
    atom_discrepancy,
    cluster_eigenvalues,
    counting_measure,
    decompose,
    joint_atoms,
    levy_distance,
    nd_counting_measure,
    nd_spectral_measure_delta,
    nd_subspace,
    solve_pencil,
    spectral_measure_delta,
)
from fractal_spectra.structure import builtin_structure


def operator(name: str, n: int, letters=None):
    structure = builtin_structure(name)
    word = BlowupWord(letters if letters is not None else (1,) * n)
    return assemble_level(structure, build_level(structure, n), word)


def test_interval_level_one_spectra():
    op = operator("interval", 1)

    neumann = decompose(op, "neumann")
    np.testing.assert_allclose(neumann.lambdas, [-4.0, -2.0, 0.0], atol=1e-12)
    # b-orthonormal eigenvectors
    np.testing.assert_allclose(neumann.vectors.T @ (op.masses[:, None] * neumann.vectors), np.eye(3), atol=1e-12)

    dirichlet = decompose(op, "dirichlet")
    np.testing.assert_allclose(dirichlet.lambdas, [-2.0], atol=1e-12)
    np.testing.assert_array_equal(dirichlet.indices, [1])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_interval_neumann_closed_form(n):
    k = np.arange(2**n + 1)
    expected = np.sort(-2.0 * (1.0 - np.cos(k * np.pi / 2**n)))

    np.testing.assert_allclose(decompose(operator("interval", n)).lambdas, expected, atol=1e-9)


def test_decompose_with_unscaled_masses():
    op = operator("sg3", 2, (1, 2))
    scaled = decompose(op, "neumann")
    unscaled = decompose(op, "neumann", mass="btilde")

    assert scaled.mass_used == "b_n"
    assert unscaled.mass_used == "btilde"
    # b_n = omega_scale * btilde, so theta scales by omega_scale
    np.testing.assert_allclose(unscaled.lambdas, op.omega_scale * scaled.lambdas, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(unscaled.masses, op.btilde)

    with pytest.raises(UnknownName):
        decompose(op, "neumann", mass="uniform")


def test_sg3_level_one_dirichlet():
    d = decompose(operator("sg3", 1), "dirichlet")
    np.testing.assert_allclose(d.lambdas, [-7.5, -7.5, -3.0], atol=1e-10)


@pytest.mark.parametrize("name,n", [("interval", 3), ("sg3", 2)])
def test_spectra_lie_in_norm_bound(name, n):
    op = operator(name, n)
    for bc in ["neumann", "dirichlet"]:
        lambdas = decompose(op, bc).lambdas
        assert lambdas.max() <= 1e-10
        assert lambdas.min() >= -op.norm_bound - 1e-10


def test_counting_measure_clusters_multiplicities():
    measure = counting_measure(decompose(operator("sg3", 1), "dirichlet"))

    np.testing.assert_allclose(measure.locations, [-7.5, -3.0], atol=1e-10)
    np.testing.assert_allclose(measure.weights, [2.0, 1.0])
    assert measure.total_mass == pytest.approx(3.0)


def test_spectral_measure_of_center():
    op = operator("interval", 1)
    sigma = spectral_measure_delta(op, decompose(op), 1)

    np.testing.assert_allclose(sigma.locations, [-4.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(sigma.weights, [0.5, 0.5], atol=1e-12)


def test_spectral_measure_of_left_end():
    op = operator("interval", 1)
    sigma = spectral_measure_delta(op, decompose(op), 0)

    np.testing.assert_allclose(sigma.locations, [-4.0, -2.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(sigma.weights, [0.125, 0.25, 0.125], atol=1e-12)
    # normalised by b_1(x) = 1/2 it is a probability measure
    np.testing.assert_allclose(sigma.scaled(1.0 / op.masses[0]).weights, [0.25, 0.5, 0.25], atol=1e-12)


@pytest.mark.parametrize("name,n", [("interval", 2), ("sg3", 2)])
def test_spectral_measure_mass_is_vertex_mass(name, n):
    op = operator(name, n)
    d = decompose(op)
    for x in range(op.n_vertices):
        assert spectral_measure_delta(op, d, x).total_mass == pytest.approx(op.masses[x], rel=1e-10)


def test_spectral_measure_out_of_range():
    op = operator("interval", 1)
    with pytest.raises(IndexOutOfRange):
        spectral_measure_delta(op, decompose(op), 3)


def test_interval_has_no_nd_eigenfunctions():
    for n in [1, 2, 3]:
        assert nd_subspace(operator("interval", n)).dimension == 0


def test_sg3_nd_subspace():
    assert nd_subspace(operator("sg3", 1)).dimension == 0

    op = operator("sg3", 2)
    nd = nd_subspace(op)
    assert nd.dimension == 4

    measure = nd_counting_measure(op, nd=nd)
    np.testing.assert_allclose(measure.locations, [-9.0, -7.5], atol=1e-9)
    np.testing.assert_allclose(measure.weights, [3.0, 1.0])

    basis = nd.basis()
    boundary = list(op.level.boundary)
    np.testing.assert_allclose(basis[boundary], 0.0)
    np.testing.assert_allclose(basis.T @ (op.masses[:, None] * basis), np.eye(4), atol=1e-9)
    for pair in nd.pairs:
        residual = op.A @ pair.basis + (-pair.lambda_) * op.masses[:, None] * pair.basis
        np.testing.assert_allclose(residual, 0.0, atol=1e-9)


def test_nd_spectral_measure_is_dominated():
    op = operator("sg3", 2)
    d, nd = decompose(op), nd_subspace(op)
    for x in range(op.n_vertices):
        full = spectral_measure_delta(op, d, x)
        restricted = nd_spectral_measure_delta(op, nd, x)
        for location, weight in zip(restricted.locations, restricted.weights):
            assert weight <= full.mass_at(location, 1e-8) + 1e-10


def test_solve_pencil_errors():
    with pytest.raises(NotSymmetric):
        solve_pencil(np.array([[1.0, 2.0], [0.0, 1.0]]), np.ones(2))
    with pytest.raises(NonpositiveMass):
        solve_pencil(np.eye(2), np.array([1.0, 0.0]))
    with pytest.raises(SizeCapExceeded):
        solve_pencil(np.eye(3), np.ones(3), cap=2)


def test_cluster_eigenvalues():
    values = np.array([-3.0, -3.0 + 1e-12, -2.0, -1.0, -1.0 + 5e-13, -1.0 + 1e-12])
    assert cluster_eigenvalues(values, 1e-9) == [(0, 2), (2, 3), (3, 6)]
    assert cluster_eigenvalues(np.zeros(0), 1e-9) == []


def test_point_measure_from_values():
    measure = PointMeasure.from_values([0.0, -1.0, 1e-12, -1.0], [1.0, 2.0, 3.0, 0.5], cluster_tol=1e-9)

    np.testing.assert_allclose(measure.locations, [-1.0, 0.5e-12])
    np.testing.assert_allclose(measure.weights, [2.5, 4.0])
    assert measure.mass_at(0.0) == pytest.approx(4.0)
    assert measure.summary()["n_atoms"] == 2


def test_point_measure_aggregate():
    first = PointMeasure.from_values([-1.0, 0.0], [1.0, 1.0], cluster_tol=1e-9)
    second = PointMeasure.from_values([-2.0, 0.0], [1.0, 1.0], cluster_tol=1e-9)
    total = PointMeasure.aggregate([first, second])

    np.testing.assert_allclose(total.locations, [-2.0, -1.0, 0.0])
    np.testing.assert_allclose(total.weights, [1.0, 1.0, 2.0])


def test_joint_atoms_and_discrepancy():
    first = PointMeasure.from_values([-1.0, 0.0], [1.0, 2.0], cluster_tol=1e-9)
    second = PointMeasure.from_values([-1.0 + 1e-12, -0.5], [1.25, 1.0], cluster_tol=1e-9)

    centers, table = joint_atoms([first, second], 1e-9)
    np.testing.assert_allclose(centers, [-1.0, -0.5, 0.0], atol=1e-11)
    np.testing.assert_allclose(table, [[1.0, 0.0, 2.0], [1.25, 1.0, 0.0]])
    assert atom_discrepancy(first, second) == pytest.approx(2.0)
    assert atom_discrepancy(first, first) == 0.0


@pytest.mark.parametrize(
    "first,second,expected",
    [
        (([0.0], [1.0]), ([0.0], [1.0]), 0.0),
        (([0.0], [0.5]), ([1.0], [0.5]), 0.5),
        (([0.0], [1.0]), ([1.0], [1.0]), 1.0),
        (([0.0], [0.1]), ([0.3], [0.1]), 0.1),
        (([0.0], [1.0]), ([0.0], [0.75]), 0.25),
    ],
)
def test_levy_distance(first, second, expected):
    M1 = PointMeasure.from_values(*first, cluster_tol=1e-9)
    M2 = PointMeasure.from_values(*second, cluster_tol=1e-9)

    assert levy_distance(M1, M2) == pytest.approx(expected)
    assert levy_distance(M2, M1) == pytest.approx(expected)
