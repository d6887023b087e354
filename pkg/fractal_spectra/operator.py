from dataclasses import dataclass, field
from logging import getLogger
from typing import Optional

import numpy as np
from scipy.linalg import eigh
from scipy.sparse import coo_matrix, csr_matrix

from .errors import EmptyInterior, UnknownName
from .lattice import BlowupWord, LatticeLevel, check_word
from .structure import SelfSimilarStructure

LOGGER = getLogger("operator")


@dataclass(frozen=True, eq=False)
class BaseForm:
    # A0 f(x) = -sum_y a_xy (f(y) - f(x))
    A0: np.ndarray
    b0: np.ndarray


@dataclass(frozen=True, eq=False)
class Pencil:
    """The pair (A, diag(masses)) on the vertices `indices` of a level."""

    A: csr_matrix
    masses: np.ndarray
    indices: np.ndarray
    which: str

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True, eq=False)
class LevelOperator:
    level: LatticeLevel
    word: BlowupWord
    A: csr_matrix
    # b_n = omega_scale * btilde
    masses: np.ndarray
    btilde: np.ndarray
    omega_scale: float
    norm_bound: float = field(default=float("nan"))

    @property
    def structure(self) -> SelfSimilarStructure:
        return self.level.structure

    @property
    def n(self) -> int:
        return self.level.n

    @property
    def n_vertices(self) -> int:
        return self.level.n_vertices

    def neumann_pencil(self) -> Pencil:
        return Pencil(A=self.A, masses=self.masses, indices=np.arange(self.n_vertices, dtype=int), which="neumann")

    def quadratic_form(self, f: np.ndarray) -> float:
        return float(f @ (self.A @ f))


def assemble_base(s: SelfSimilarStructure) -> BaseForm:
    conductances = s.conductance_matrix()
    A0 = np.diag(conductances.sum(axis=1)) - conductances
    return BaseForm(A0=A0, b0=s.mass_vector())


def norm_bound(s: SelfSimilarStructure) -> float:
    """Largest generalized eigenvalue of (A0, diag(b0)), bounding every level spectrum by [-K, 0]."""
    base = assemble_base(s)
    thetas = eigh(base.A0, np.diag(base.b0), eigvals_only=True)
    return float(np.max(thetas))


def assemble_level(s: SelfSimilarStructure, level: LatticeLevel, w: BlowupWord) -> LevelOperator:
    """
    Aggregates the cell copies of A0 and b into A_<n> and b_<n>.

    The cell (j_1..j_n) contributes its copy of A0 with the coefficient
    alpha_{w_1}..alpha_{w_n} / alpha_{j_1}..alpha_{j_n} and its copy of b with
    beta_{w_1}^-1..beta_{w_n}^-1 beta_{j_1}..beta_{j_n}. Products are taken in log space.
    """
    check_word(s, w, level.n)
    LOGGER.debug(f"\t+ Assembling level {level.n} operator for word ({w})")

    base = assemble_base(s)
    n_cells, n_labels = level.cell_vertices.shape

    log_alpha, log_beta = np.log(np.array(s.alpha)), np.log(np.array(s.beta))
    letters = np.array(w.letters, dtype=int) - 1
    log_alpha_omega = float(log_alpha[letters].sum())
    log_beta_omega = float(log_beta[letters].sum())

    if level.n > 0:
        cells = np.array(np.unravel_index(np.arange(n_cells), (s.n_cells,) * level.n)).T
    else:
        cells = np.zeros((1, 0), dtype=int)
    coefficients = np.exp(log_alpha_omega - log_alpha[cells].sum(axis=1))
    cell_masses = np.exp(log_beta[cells].sum(axis=1))

    rows, cols, data = [], [], []
    for zi in range(n_labels):
        for zj in range(n_labels):
            if base.A0[zi, zj] != 0.0:
                rows.append(level.cell_vertices[:, zi])
                cols.append(level.cell_vertices[:, zj])
                data.append(coefficients * base.A0[zi, zj])

    size = level.n_vertices
    if data:
        A = coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size))
        A = A.tocsr()
    else:
        A = csr_matrix((size, size))
    A.sum_duplicates()

    btilde = np.zeros(size, dtype=float)
    for zi in range(n_labels):
        np.add.at(btilde, level.cell_vertices[:, zi], cell_masses * base.b0[zi])

    omega_scale = float(np.exp(-log_beta_omega))

    return LevelOperator(
        level=level,
        word=w,
        A=A,
        masses=omega_scale * btilde,
        btilde=btilde,
        omega_scale=omega_scale,
        norm_bound=norm_bound(s),
    )


def restrict_dirichlet(op: LevelOperator) -> Pencil:
    interior = np.array(op.level.interior, dtype=int)
    if len(interior) == 0:
        raise EmptyInterior(f"Level {op.n} has no interior vertex, the Dirichlet problem is undefined")

    return Pencil(
        A=op.A[interior][:, interior].tocsr(), masses=op.masses[interior], indices=interior, which="dirichlet"
    )


def select_pencil(op: LevelOperator, bc: str) -> Pencil:
    if bc == "neumann":
        return op.neumann_pencil()
    elif bc == "dirichlet":
        return restrict_dirichlet(op)

    raise UnknownName(f"Unknown boundary condition {bc!r}, expected 'neumann' or 'dirichlet'")


def zero_extend(op: LevelOperator, values: np.ndarray, indices: Optional[np.ndarray] = None) -> np.ndarray:
    """Extends functions given on `indices` (rows of `values`) by zero to all vertices."""
    if indices is None:
        indices = np.array(op.level.interior, dtype=int)

    extended = np.zeros((op.n_vertices,) + values.shape[1:], dtype=float)
    extended[indices] = values
    return extended
