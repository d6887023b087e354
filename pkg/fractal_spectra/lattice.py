from dataclasses import dataclass, field
from itertools import product
from logging import getLogger
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from .errors import IndexOutOfRange, LengthMismatch, SizeCapExceeded, UsageError
from .structure import SelfSimilarStructure

LOGGER = getLogger("lattice")

DEFAULT_VERTEX_CAP = 20000
DEFAULT_WORD_CAP = 100000

RawAddress = Tuple[Tuple[int, ...], str]


@dataclass(frozen=True, order=True)
class VertexAddress:
    """A cell path (coarse to fine) and a boundary label of that cell."""

    word: Tuple[int, ...]
    label: str

    def __str__(self) -> str:
        return "(" + ",".join([str(j) for j in self.word] + [self.label]) + ")"


@dataclass(frozen=True)
class BlowupWord:
    letters: Tuple[int, ...]
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(int(letter) for letter in self.letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return ",".join(str(letter) for letter in self.letters)


@dataclass(frozen=True, eq=False)
class LatticeLevel:
    n: int
    structure: SelfSimilarStructure
    vertices: Tuple[VertexAddress, ...]
    labelings: Tuple[Tuple[VertexAddress, ...], ...]
    equivalence: Dict[RawAddress, int] = field(repr=False)
    boundary: Tuple[int, ...]
    interior: Tuple[int, ...]
    # vertex index of label z in the cell of lexicographic rank c, shape (N^n, k)
    cell_vertices: np.ndarray = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_cells(self) -> int:
        return self.cell_vertices.shape[0]

    def address(self, v: int) -> VertexAddress:
        if not 0 <= v < self.n_vertices:
            raise IndexOutOfRange(f"Vertex {v} out of range for level {self.n} with {self.n_vertices} vertices")
        return self.vertices[v]

    def index_of(self, word: Sequence[int], label: str) -> int:
        key = (tuple(word), label)
        if key not in self.equivalence:
            raise IndexOutOfRange(f"No vertex with address {VertexAddress(*key)} at level {self.n}")
        return self.equivalence[key]

    def boundary_index(self, label: str) -> int:
        return self.boundary[self.structure.label_index(label)]


def predicted_vertex_counts(s: SelfSimilarStructure, n: int) -> List[int]:
    """|V_0| = |F| and |V_m| = N |V_{m-1}| - g with g the number of gluings."""
    counts = [s.n_labels]
    for _ in range(n):
        counts.append(s.n_cells * counts[-1] - len(s.gluings))
    return counts


def _address_key(s: SelfSimilarStructure, address: RawAddress) -> Tuple[Tuple[int, ...], int]:
    return address[0], s.label_index(address[1])


def build_level(s: SelfSimilarStructure, n: int, cap: int = DEFAULT_VERTEX_CAP) -> LatticeLevel:
    """
    Builds F_<n> as N glued copies of F_<n-1>.

    Vertices are gluing classes of raw addresses (j_1..j_n, z), each represented by its
    lexicographically least address, and are indexed in the order of those representatives.
    """
    if n < 0:
        raise UsageError(f"Level must be non-negative, got {n}")

    predicted = predicted_vertex_counts(s, n)
    if max(predicted) > cap:
        raise SizeCapExceeded(f"Level {n} would have {predicted[-1]} vertices, exceeding the vertex cap of {cap}")

    LOGGER.info(f"\t+ Building level {n} of {s.name or 'structure'} ({predicted[-1]} vertices expected)")

    classes: List[List[RawAddress]] = [[((), label)] for label in s.boundary_labels]
    boundary_class = {label: i for i, label in enumerate(s.boundary_labels)}

    for _ in range(n):
        size = len(classes)
        disjoint_set = DisjointSet(range(s.n_cells * size))
        for (i, z), (j, w) in s.gluings:
            disjoint_set.merge((i - 1) * size + boundary_class[z], (j - 1) * size + boundary_class[w])

        groups: Dict[int, List[RawAddress]] = {}
        roots = {}
        for copy in range(s.n_cells):
            for c, members in enumerate(classes):
                root = disjoint_set[copy * size + c]
                roots[copy * size + c] = root
                groups.setdefault(root, []).extend(((copy + 1,) + word, label) for word, label in members)

        ordered_roots = sorted(groups, key=lambda root: min(_address_key(s, a) for a in groups[root]))
        position = {root: index for index, root in enumerate(ordered_roots)}
        classes = [sorted(groups[root], key=lambda a: _address_key(s, a)) for root in ordered_roots]
        boundary_class = {
            label: position[roots[(s.tag_of(label) - 1) * size + boundary_class[label]]] for label in s.boundary_labels
        }

    if len(classes) != predicted[-1]:
        LOGGER.warning(f"\t+ Level {n} has {len(classes)} vertices, the recursion predicted {predicted[-1]}")

    equivalence: Dict[RawAddress, int] = {}
    cell_vertices = np.zeros((s.n_cells**n, s.n_labels), dtype=int)
    for v, members in enumerate(classes):
        for word, label in members:
            equivalence[(word, label)] = v
            cell = 0
            for letter in word:
                cell = cell * s.n_cells + (letter - 1)
            cell_vertices[cell, s.label_index(label)] = v

    boundary = tuple(boundary_class[label] for label in s.boundary_labels)
    boundary_set = set(boundary)

    return LatticeLevel(
        n=n,
        structure=s,
        vertices=tuple(VertexAddress(*members[0]) for members in classes),
        labelings=tuple(tuple(VertexAddress(*a) for a in members) for members in classes),
        equivalence=equivalence,
        boundary=boundary,
        interior=tuple(v for v in range(len(classes)) if v not in boundary_set),
        cell_vertices=cell_vertices,
    )


def check_word(s: SelfSimilarStructure, w: BlowupWord, n: int) -> None:
    if len(w) != n:
        raise LengthMismatch(f"Blow-up word {w} has length {len(w)}, expected {n}")

    for letter in w.letters:
        if not 1 <= letter <= s.n_cells:
            raise IndexOutOfRange(f"Blow-up word {w} has letter {letter} outside 1..{s.n_cells}")


def embed_base(level: LatticeLevel, w: BlowupWord) -> Dict[str, int]:
    """F_<0> sits in F_<n> as the cell (w_n, ..., w_1)."""
    check_word(level.structure, w, level.n)
    cell = tuple(reversed(w.letters))
    return {label: level.equivalence[(cell, label)] for label in level.structure.boundary_labels}


def embed_level(coarse: LatticeLevel, fine: LatticeLevel, w: BlowupWord) -> np.ndarray:
    """Indices in F_<n> of the vertices of F_<p>, placed as the cell (w_n, ..., w_{p+1})."""
    if coarse.n > fine.n:
        raise LengthMismatch(f"Cannot embed level {coarse.n} into level {fine.n}")

    check_word(fine.structure, w, fine.n)
    prefix = tuple(reversed(w.letters[coarse.n :]))
    return np.array([fine.equivalence[(prefix + a.word, a.label)] for a in coarse.vertices], dtype=int)


def boundary_persistence(s: SelfSimilarStructure, w: BlowupWord) -> Tuple[str, ...]:
    """Labels q_m that stay on the boundary at every level, i.e. with w_i = m for all i."""
    return tuple(
        label for label, tag in zip(s.boundary_labels, s.cell_tags) if all(letter == tag for letter in w.letters)
    )


def generate_words(
    s: SelfSimilarStructure,
    n: int,
    mode: str = "enumerate",
    count: Optional[int] = None,
    seed: Optional[int] = None,
    cap: int = DEFAULT_WORD_CAP,
) -> List[BlowupWord]:
    if mode == "enumerate":
        if s.n_cells**n > cap:
            raise SizeCapExceeded(f"Enumerating {s.n_cells}^{n} words exceeds the word cap of {cap}")

        return [BlowupWord(letters) for letters in product(range(1, s.n_cells + 1), repeat=n)]

    elif mode == "sample":
        if count is None or count <= 0:
            raise UsageError(f"Sampling requires a positive word count, got {count}")
        if seed is None:
            raise UsageError("Sampling requires a seed")
        if count > cap:
            raise SizeCapExceeded(f"Sampling {count} words exceeds the word cap of {cap}")

        rng = np.random.default_rng(seed)
        letters = rng.integers(1, s.n_cells + 1, size=(count, n))
        return [BlowupWord(tuple(row.tolist()), seed=seed) for row in letters]

    raise UsageError(f"Unknown word generation mode {mode!r}, expected 'enumerate' or 'sample'")
