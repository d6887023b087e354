from dataclasses import dataclass, field
from logging import getLogger
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh, svd
from scipy.sparse import issparse

from .errors import IndexOutOfRange, NonpositiveMass, NotSymmetric, SizeCapExceeded, SolverError, UnknownName
from .operator import LevelOperator, Pencil, restrict_dirichlet, select_pencil, zero_extend

LOGGER = getLogger("spectra")

DEFAULT_DENSE_CAP = 4000
DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_CLUSTER_FACTOR = 1e-9
SYMMETRY_TOL = 1e-12
# spectral weights below this fraction of b_n(x) are rounding noise
NEGLIGIBLE_WEIGHT = 1e-13
# mass vectors a pencil can be solved against
MASSES = ["b_n", "btilde"]


@dataclass(frozen=True, eq=False)
class Eigendecomposition:
    # ascending, lambda = -theta <= 0
    lambdas: np.ndarray
    # columns, orthonormal for sum_x f(x) g(x) masses(x)
    vectors: np.ndarray
    which: str
    # vertex indices of the rows of `vectors`
    indices: np.ndarray
    masses: np.ndarray
    mass_used: str = "b_n"
    norm_bound: Optional[float] = None

    @property
    def size(self) -> int:
        return len(self.lambdas)

    def default_cluster_tol(self) -> float:
        if self.norm_bound is not None and np.isfinite(self.norm_bound) and self.norm_bound > 0:
            return DEFAULT_CLUSTER_FACTOR * self.norm_bound
        scale = float(np.max(np.abs(self.lambdas))) if self.size else 0.0
        return DEFAULT_CLUSTER_FACTOR * max(1.0, scale)


def cluster_eigenvalues(values: np.ndarray, tol: float) -> List[Tuple[int, int]]:
    """Index ranges [start, end) of sorted `values` whose consecutive gaps are at most `tol`."""
    if len(values) == 0:
        return []

    breaks = np.nonzero(np.diff(values) > tol)[0] + 1
    starts = np.concatenate([[0], breaks])
    ends = np.concatenate([breaks, [len(values)]])
    return [(int(start), int(end)) for start, end in zip(starts, ends)]


@dataclass(eq=False)
class PointMeasure:
    """A finite measure sum_i weights[i] delta_{locations[i]} with strictly increasing locations."""

    locations: np.ndarray = field(default_factory=lambda: np.zeros(0))
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cluster_tol: float = 0.0

    def __post_init__(self):
        self.locations = np.asarray(self.locations, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)

    @classmethod
    def from_values(
        cls, values: Sequence[float], weights: Sequence[float], cluster_tol: float, drop_below: float = 0.0
    ) -> "PointMeasure":
        """Clusters `values` (mean location, summed weight) and keeps atoms heavier than `drop_below`."""
        values = np.asarray(values, dtype=float)
        weights = np.asarray(weights, dtype=float)
        if len(values) == 0:
            return cls(cluster_tol=cluster_tol)

        order = np.argsort(values, kind="stable")
        values, weights = values[order], weights[order]

        clusters = cluster_eigenvalues(values, cluster_tol)
        locations = np.array([values[start:end].mean() for start, end in clusters])
        masses = np.array([weights[start:end].sum() for start, end in clusters])

        keep = masses > drop_below
        return cls(locations=locations[keep], weights=masses[keep], cluster_tol=cluster_tol)

    @classmethod
    def aggregate(cls, measures: Sequence["PointMeasure"], cluster_tol: Optional[float] = None) -> "PointMeasure":
        """Sum of several measures, atoms merged by clustering."""
        if cluster_tol is None:
            cluster_tol = max([m.cluster_tol for m in measures], default=0.0)

        locations = np.concatenate([m.locations for m in measures]) if measures else np.zeros(0)
        weights = np.concatenate([m.weights for m in measures]) if measures else np.zeros(0)
        return cls.from_values(locations, weights, cluster_tol)

    @property
    def n_atoms(self) -> int:
        return len(self.locations)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    @property
    def support(self) -> np.ndarray:
        return self.locations.copy()

    def scaled(self, factor: float) -> "PointMeasure":
        return PointMeasure(
            locations=self.locations.copy(), weights=self.weights * factor, cluster_tol=self.cluster_tol
        )

    def mass_at(self, location: float, tol: Optional[float] = None) -> float:
        tol = self.cluster_tol if tol is None else tol
        return float(self.weights[np.abs(self.locations - location) <= tol].sum())

    def to_records(self, kind: str) -> List[Dict[str, float]]:
        return [
            {"lambda": float(location), "weight": float(weight), "kind": kind}
            for location, weight in zip(self.locations, self.weights)
        ]

    def summary(self) -> Dict[str, float]:
        return {
            "n_atoms": self.n_atoms,
            "total_mass": self.total_mass,
            "min": float(self.locations.min()) if self.n_atoms else None,
            "max": float(self.locations.max()) if self.n_atoms else None,
            "cluster_tol": self.cluster_tol,
        }

    def log(self, prefix: str = "measure"):
        LOGGER.info(f"\t\t+ {prefix} atoms: {self.n_atoms}")
        LOGGER.info(f"\t\t+ {prefix} total mass: {self.total_mass:.12g}")
        if self.n_atoms:
            LOGGER.info(f"\t\t+ {prefix} support: [{self.locations.min():.12g}, {self.locations.max():.12g}]")


def solve_pencil(
    A,
    B: np.ndarray,
    which: str = "neumann",
    indices: Optional[np.ndarray] = None,
    cap: int = DEFAULT_DENSE_CAP,
    mass_used: str = "b_n",
    norm_bound: Optional[float] = None,
) -> Eigendecomposition:
    """
    Full spectrum of A v = theta B v for A symmetric and B positive diagonal (given as a vector).

    The pencil is symmetrized as B^-1/2 A B^-1/2 and handed to a dense symmetric solver, the
    eigenvectors are mapped back so that they are B-orthonormal, and lambda = -theta.
    """
    masses = np.asarray(B, dtype=float).ravel()
    size = A.shape[0]
    if indices is None:
        indices = np.arange(size, dtype=int)

    if size > cap:
        raise SizeCapExceeded(f"Pencil of size {size} exceeds the dense solver cap of {cap}")
    if len(masses) != size:
        raise NonpositiveMass(f"Mass vector has {len(masses)} entries for a pencil of size {size}")
    if size and (not np.all(np.isfinite(masses)) or np.min(masses) <= 0):
        raise NonpositiveMass(f"Masses must be finite and positive, got minimum {np.min(masses)}")

    dense = A.toarray() if issparse(A) else np.asarray(A, dtype=float)
    if size and np.max(np.abs(dense - dense.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(dense))):
        raise NotSymmetric(f"Pencil matrix is not symmetric (asymmetry {np.max(np.abs(dense - dense.T)):.3e})")

    if size == 0:
        return Eigendecomposition(
            lambdas=np.zeros(0),
            vectors=np.zeros((0, 0)),
            which=which,
            indices=indices,
            masses=masses,
            mass_used=mass_used,
            norm_bound=norm_bound,
        )

    inv_sqrt = 1.0 / np.sqrt(masses)
    symmetrized = inv_sqrt[:, None] * dense * inv_sqrt[None, :]
    symmetrized = 0.5 * (symmetrized + symmetrized.T)

    try:
        thetas, unitary = eigh(symmetrized)
    except LinAlgError as error:
        raise SolverError(f"Dense symmetric eigensolver failed: {error}")

    vectors = inv_sqrt[:, None] * unitary

    return Eigendecomposition(
        lambdas=-thetas[::-1],
        vectors=vectors[:, ::-1],
        which=which,
        indices=indices,
        masses=masses,
        mass_used=mass_used,
        norm_bound=norm_bound,
    )


def decompose(
    op: LevelOperator, bc: str = "neumann", cap: int = DEFAULT_DENSE_CAP, mass: str = "b_n"
) -> Eigendecomposition:
    """Spectrum of the Neumann or Dirichlet pencil, against b_n or against the unscaled btilde_n."""
    pencil: Pencil = select_pencil(op, bc)
    if mass == "b_n":
        masses, norm_bound = pencil.masses, op.norm_bound
    elif mass == "btilde":
        masses, norm_bound = op.btilde[pencil.indices], op.omega_scale * op.norm_bound
    else:
        raise UnknownName(f"Unknown mass {mass!r}, expected one of {MASSES}")

    LOGGER.debug(f"\t+ Solving {pencil.which} pencil of size {pencil.size} against {mass} at level {op.n}")
    return solve_pencil(
        pencil.A, masses, which=pencil.which, indices=pencil.indices, cap=cap, mass_used=mass, norm_bound=norm_bound
    )


def counting_measure(d: Eigendecomposition, scale: float = 1.0, cluster_tol: Optional[float] = None) -> PointMeasure:
    cluster_tol = d.default_cluster_tol() if cluster_tol is None else cluster_tol
    return PointMeasure.from_values(d.lambdas, np.full(d.size, scale, dtype=float), cluster_tol)


@dataclass(frozen=True, eq=False)
class NDPair:
    lambda_: float
    multiplicity: int
    # on all vertices, zero on the boundary, b_n-orthonormal
    basis: np.ndarray


@dataclass(frozen=True, eq=False)
class NDSubspace:
    pairs: Tuple[NDPair, ...]
    residual_tol: float
    cluster_tol: float
    n_vertices: int
    # largest boundary residual of the retained vectors
    max_residual: float = 0.0

    @property
    def dimension(self) -> int:
        return sum(pair.multiplicity for pair in self.pairs)

    def basis(self) -> np.ndarray:
        if not self.pairs:
            return np.zeros((self.n_vertices, 0))
        return np.hstack([pair.basis for pair in self.pairs])

    def lambdas(self) -> np.ndarray:
        return np.array([pair.lambda_ for pair in self.pairs], dtype=float)


def nd_subspace(
    op: LevelOperator,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    cluster_tol: Optional[float] = None,
    cap: int = DEFAULT_DENSE_CAP,
    dirichlet: Optional[Eigendecomposition] = None,
) -> NDSubspace:
    """
    Neumann-Dirichlet eigenfunctions: Dirichlet eigenfunctions whose zero extension also
    satisfies the eigen-equation at the boundary rows.

    For each Dirichlet cluster with basis V, the boundary residual R = (A V + theta B V)|boundary
    is computed and its numerical nullspace (singular values below
    residual_tol * max(sigma_max, theta max b)) gives the N-D combinations.
    """
    pencil = restrict_dirichlet(op)
    if dirichlet is None:
        dirichlet = solve_pencil(
            pencil.A, pencil.masses, which="dirichlet", indices=pencil.indices, cap=cap, norm_bound=op.norm_bound
        )
    cluster_tol = dirichlet.default_cluster_tol() if cluster_tol is None else cluster_tol

    boundary = np.array(op.level.boundary, dtype=int)
    max_mass = float(np.max(op.masses))

    pairs, max_residual = [], 0.0
    for start, end in cluster_eigenvalues(dirichlet.lambdas, cluster_tol):
        theta = -float(dirichlet.lambdas[start:end].mean())

        extended = zero_extend(op, dirichlet.vectors[:, start:end], dirichlet.indices)
        residual = (op.A @ extended + theta * op.masses[:, None] * extended)[boundary]

        try:
            _, sigmas, right = svd(residual, full_matrices=True)
        except LinAlgError as error:
            raise SolverError(f"SVD of the boundary residual failed: {error}")

        sigma_max = float(sigmas.max()) if sigmas.size else 0.0
        threshold = residual_tol * max(sigma_max, theta * max_mass)
        rank = int(np.sum(sigmas > threshold))
        multiplicity = (end - start) - rank
        if multiplicity == 0:
            continue

        basis = extended @ right[rank:].T
        basis[boundary] = 0.0
        check = (op.A @ basis + theta * op.masses[:, None] * basis)[boundary]
        max_residual = max(max_residual, float(np.max(np.abs(check))) if check.size else 0.0)
        pairs.append(NDPair(lambda_=-theta, multiplicity=multiplicity, basis=basis))

    nd = NDSubspace(
        pairs=tuple(pairs),
        residual_tol=residual_tol,
        cluster_tol=cluster_tol,
        n_vertices=op.n_vertices,
        max_residual=max_residual,
    )
    LOGGER.debug(f"\t+ Level {op.n} has {nd.dimension} Neumann-Dirichlet eigenfunctions")
    return nd


def nd_counting_measure(
    op: LevelOperator,
    scale: float = 1.0,
    nd: Optional[NDSubspace] = None,
    residual_tol: float = DEFAULT_RESIDUAL_TOL,
    cluster_tol: Optional[float] = None,
    cap: int = DEFAULT_DENSE_CAP,
) -> PointMeasure:
    if nd is None:
        nd = nd_subspace(op, residual_tol=residual_tol, cluster_tol=cluster_tol, cap=cap)

    return PointMeasure.from_values(
        [pair.lambda_ for pair in nd.pairs], [scale * pair.multiplicity for pair in nd.pairs], nd.cluster_tol
    )


def _check_vertex(op: LevelOperator, x: int) -> None:
    if not 0 <= x < op.n_vertices:
        raise IndexOutOfRange(f"Vertex {x} out of range for level {op.n} with {op.n_vertices} vertices")


def spectral_measure_delta(
    op: LevelOperator, d: Eigendecomposition, x: int, cluster_tol: Optional[float] = None
) -> PointMeasure:
    """sigma(delta_x): atoms (lambda_i, b_n(x)^2 h_i(x)^2) for the b_n-orthonormal eigenvectors h_i."""
    _check_vertex(op, x)
    cluster_tol = d.default_cluster_tol() if cluster_tol is None else cluster_tol

    rows = np.nonzero(d.indices == x)[0]
    if len(rows) == 0:
        return PointMeasure(cluster_tol=cluster_tol)

    mass = float(op.masses[x])
    weights = mass**2 * d.vectors[rows[0], :] ** 2
    return PointMeasure.from_values(d.lambdas, weights, cluster_tol, drop_below=NEGLIGIBLE_WEIGHT * mass)


def nd_spectral_measure_delta(op: LevelOperator, nd: NDSubspace, x: int) -> PointMeasure:
    """Spectral measure of the projection of delta_x on the Neumann-Dirichlet eigenspaces."""
    _check_vertex(op, x)

    mass = float(op.masses[x])
    weights = [mass**2 * float(np.sum(pair.basis[x, :] ** 2)) for pair in nd.pairs]
    return PointMeasure.from_values(
        [pair.lambda_ for pair in nd.pairs], weights, nd.cluster_tol, drop_below=NEGLIGIBLE_WEIGHT * mass
    )


def joint_atoms(measures: Sequence[PointMeasure], tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Locations of the joint clusters and the weight of every measure in every cluster."""
    locations = np.concatenate([m.locations for m in measures] + [np.zeros(0)])
    owners = np.concatenate([np.full(m.n_atoms, i, dtype=int) for i, m in enumerate(measures)] + [np.zeros(0, int)])
    weights = np.concatenate([m.weights for m in measures] + [np.zeros(0)])

    order = np.argsort(locations, kind="stable")
    locations, owners, weights = locations[order], owners[order], weights[order]

    clusters = cluster_eigenvalues(locations, tol)
    table = np.zeros((len(measures), len(clusters)), dtype=float)
    centers = np.zeros(len(clusters), dtype=float)
    for c, (start, end) in enumerate(clusters):
        centers[c] = locations[start:end].mean()
        np.add.at(table[:, c], owners[start:end], weights[start:end])

    return centers, table


def atom_discrepancy(M1: PointMeasure, M2: PointMeasure, tol: Optional[float] = None) -> float:
    """Largest absolute weight difference over the atoms of the joint clustering of M1 and M2."""
    tol = max(M1.cluster_tol, M2.cluster_tol) if tol is None else tol
    _, table = joint_atoms([M1, M2], tol)
    if table.shape[1] == 0:
        return 0.0
    return float(np.max(np.abs(table[0] - table[1])))


def _sup_gap(a: np.ndarray, ca: np.ndarray, b: np.ndarray, cb: np.ndarray, h: float) -> float:
    """sup_y [F(y) - G(y + h)] for step functions with atoms a, b and cumulative masses ca, cb (leading 0)."""
    best = 0.0
    if len(a):
        best = max(best, float(np.max(ca[1:] - cb[np.searchsorted(b, a + h, side="right")])))
    if len(b):
        best = max(best, float(np.max(ca[np.searchsorted(a, b - h, side="right")] - cb[1:])))
    return best


def levy_distance(M1: PointMeasure, M2: PointMeasure) -> float:
    """
    Levy distance between the cumulative functions F and G of two finite measures:
    inf { h >= 0 : F(x - h) - h <= G(x) <= F(x + h) + h for all x }.

    The worst gap max(sup[F(x-h) - G(x)], sup[G(x) - F(x+h)]) is a right-continuous step
    function of h, constant between the pairwise distances of atoms, so the infimum is found
    by scanning those intervals.
    """
    a, b = M1.locations, M2.locations
    ca = np.concatenate([[0.0], np.cumsum(M1.weights)])
    cb = np.concatenate([[0.0], np.cumsum(M2.weights)])

    def worst_gap(h: float) -> float:
        return max(_sup_gap(a, ca, b, cb, h), _sup_gap(b, cb, a, ca, h))

    differences = np.abs(a[:, None] - b[None, :]).ravel() if len(a) and len(b) else np.zeros(0)
    breakpoints = np.concatenate([[0.0], np.unique(differences[differences > 0])])

    for k in range(len(breakpoints) - 1):
        start, end = breakpoints[k], breakpoints[k + 1]
        candidate = max(start, worst_gap(0.5 * (start + end)))
        if candidate < end:
            return float(candidate)

    last = breakpoints[-1]
    return float(max(last, worst_gap(last + 1.0)))
