import json
from dataclasses import dataclass, field
from fractions import Fraction
from logging import getLogger
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from omegaconf import OmegaConf
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .artifact_utils import ArtifactMixin, classproperty
from .errors import SchemaError, UnknownName

LOGGER = getLogger("structure")

HYPOTHESIS_TOLERANCE = 1e-12

SCHEMA_KEYS = ["n", "boundary", "gluings", "conductances", "mass", "alpha", "beta"]
OPTIONAL_SCHEMA_KEYS = ["name"]

Gluing = Tuple[Tuple[int, str], Tuple[int, str]]


@dataclass(frozen=True)
class SelfSimilarStructure:
    """
    Combinatorial blueprint of a finitely ramified self-similar set.

    Cells are indexed 1..n_cells, boundary labels are opaque strings, each tagged with the
    cell whose fixed point it is. Conductances are keyed by label pairs ordered as in
    `boundary_labels`; absent pairs have conductance 0.
    """

    n_cells: int
    boundary_labels: Tuple[str, ...]
    cell_tags: Tuple[int, ...]
    gluings: Tuple[Gluing, ...]
    conductances: Dict[Tuple[str, str], float]
    base_mass: Dict[str, float]
    alpha: Tuple[float, ...]
    beta: Tuple[float, ...]
    gamma: Optional[float] = None
    name: Optional[str] = None

    @property
    def n_labels(self) -> int:
        return len(self.boundary_labels)

    def label_index(self, label: str) -> int:
        return self.boundary_labels.index(label)

    def tag_of(self, label: str) -> int:
        return self.cell_tags[self.label_index(label)]

    def conductance(self, u: str, v: str) -> float:
        return self.conductances.get(conductance_key(self, u, v), 0.0)

    def mass_vector(self) -> np.ndarray:
        return np.array([self.base_mass.get(label, 0.0) for label in self.boundary_labels], dtype=float)

    def conductance_matrix(self) -> np.ndarray:
        k = self.n_labels
        matrix = np.zeros((k, k), dtype=float)
        for (u, v), a in self.conductances.items():
            if u in self.boundary_labels and v in self.boundary_labels:
                i, j = self.label_index(u), self.label_index(v)
                matrix[i, j] = matrix[j, i] = a
        return matrix

    def to_config(self) -> Dict[str, Any]:
        """Inverse of `parse_structure`, in the structure file schema."""
        config = {
            "n": self.n_cells,
            "boundary": [{"label": z, "cell": m} for z, m in zip(self.boundary_labels, self.cell_tags)],
            "gluings": [[[i, z], [j, w]] for (i, z), (j, w) in self.gluings],
            "conductances": [{"u": u, "v": v, "a": a} for (u, v), a in sorted(self.conductances.items())],
            "mass": [{"label": z, "b": b} for z, b in self.base_mass.items()],
            "alpha": list(self.alpha),
            "beta": list(self.beta),
        }
        if self.name is not None:
            config["name"] = self.name
        return config


@dataclass
class ValidationReport(ArtifactMixin):
    ok: bool
    violations: List[Dict[str, str]] = field(default_factory=list)
    derived: Dict[str, Optional[float]] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.ok

    def log(self):
        if self.ok:
            LOGGER.info(f"\t+ Structure is valid (gamma={self.derived.get('gamma')}, K={self.derived.get('K')})")
        else:
            LOGGER.warning(f"\t+ Structure is invalid ({len(self.violations)} violations)")
        for violation in self.violations:
            LOGGER.warning(f"\t\t+ {violation['rule']}: {violation['message']}")
        for note in self.notes:
            LOGGER.info(f"\t\t+ note: {note}")

    @classproperty
    def default_filename(cls) -> str:
        return "validation_report.json"


def conductance_key(structure: SelfSimilarStructure, u: str, v: str) -> Tuple[str, str]:
    order = {label: index for index, label in enumerate(structure.boundary_labels)}
    return (u, v) if order.get(u, len(order)) <= order.get(v, len(order)) else (v, u)


def parse_number(value: Any, where: str) -> float:
    if isinstance(value, bool):
        raise SchemaError(f"Expected a number for {where}, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    raise SchemaError(f"Expected a number or a rational string for {where}, got {value!r}")


def parse_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"Expected an integer for {where}, got {value!r}")
    return value


def parse_label(value: Any, where: str) -> str:
    if not isinstance(value, str) or value == "":
        raise SchemaError(f"Expected a non-empty string label for {where}, got {value!r}")
    return value


def _load_document(text: str) -> Dict[str, Any]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        # yaml documents (json is accepted first)
        try:
            data = OmegaConf.to_container(OmegaConf.create(text), resolve=True)
        except Exception as error:
            raise SchemaError(f"Structure document is neither valid JSON nor YAML: {error}")

    if not isinstance(data, dict):
        raise SchemaError("Structure document must be a mapping at top level")

    return data


def parse_structure(text: str) -> SelfSimilarStructure:
    """
    Parses a structure document (JSON, or YAML as a fallback) into a `SelfSimilarStructure`.

    Only the schema shape is checked here, semantics are left to `validate_structure`.
    """
    data = _load_document(text)

    missing = [key for key in SCHEMA_KEYS if key not in data]
    if missing:
        raise SchemaError(f"Missing field(s) in structure document: {missing}")

    unknown = [key for key in data if key not in SCHEMA_KEYS + OPTIONAL_SCHEMA_KEYS]
    if unknown:
        raise SchemaError(f"Unknown field(s) in structure document: {unknown}")

    n_cells = parse_int(data["n"], "n")

    if not isinstance(data["boundary"], list):
        raise SchemaError("`boundary` must be a list of {label, cell}")
    labels, tags = [], []
    for entry in data["boundary"]:
        if not isinstance(entry, dict) or set(entry.keys()) != {"label", "cell"}:
            raise SchemaError(f"Boundary entries must be {{label, cell}}, got {entry!r}")
        label = parse_label(entry["label"], "boundary.label")
        if label in labels:
            raise SchemaError(f"Duplicate boundary label {label!r}")
        labels.append(label)
        tags.append(parse_int(entry["cell"], f"boundary[{label}].cell"))

    if not isinstance(data["gluings"], list):
        raise SchemaError("`gluings` must be a list of [[cell, label], [cell, label]]")
    gluings = []
    for entry in data["gluings"]:
        if not isinstance(entry, (list, tuple)) or len(entry) != 2:
            raise SchemaError(f"Gluings must be pairs of [cell, label], got {entry!r}")
        sides = []
        for side in entry:
            if not isinstance(side, (list, tuple)) or len(side) != 2:
                raise SchemaError(f"Gluing sides must be [cell, label], got {side!r}")
            sides.append((parse_int(side[0], "gluing cell"), parse_label(side[1], "gluing label")))
        gluing = tuple(sorted(sides))
        if gluing in gluings:
            raise SchemaError(f"Duplicate gluing {entry!r}")
        gluings.append(gluing)

    if not isinstance(data["conductances"], list):
        raise SchemaError("`conductances` must be a list of {u, v, a}")
    order = {label: index for index, label in enumerate(labels)}
    conductances = {}
    for entry in data["conductances"]:
        if not isinstance(entry, dict) or set(entry.keys()) != {"u", "v", "a"}:
            raise SchemaError(f"Conductance entries must be {{u, v, a}}, got {entry!r}")
        u, v = parse_label(entry["u"], "conductance.u"), parse_label(entry["v"], "conductance.v")
        if u == v:
            raise SchemaError(f"Conductance of label {u!r} with itself is not allowed")
        key = (u, v) if order.get(u, len(order)) <= order.get(v, len(order)) else (v, u)
        if key in conductances:
            raise SchemaError(f"Duplicate conductance for pair {key!r}")
        conductances[key] = parse_number(entry["a"], f"conductance{key}")

    if not isinstance(data["mass"], list):
        raise SchemaError("`mass` must be a list of {label, b}")
    base_mass = {}
    for entry in data["mass"]:
        if not isinstance(entry, dict) or set(entry.keys()) != {"label", "b"}:
            raise SchemaError(f"Mass entries must be {{label, b}}, got {entry!r}")
        label = parse_label(entry["label"], "mass.label")
        if label in base_mass:
            raise SchemaError(f"Duplicate mass for label {label!r}")
        base_mass[label] = parse_number(entry["b"], f"mass[{label}]")

    weights = {}
    for key in ["alpha", "beta"]:
        if not isinstance(data[key], list):
            raise SchemaError(f"`{key}` must be a list of {n_cells} numbers")
        if len(data[key]) != n_cells:
            raise SchemaError(f"`{key}` must have exactly n={n_cells} entries, got {len(data[key])}")
        weights[key] = tuple(parse_number(value, f"{key}[{i}]") for i, value in enumerate(data[key], start=1))

    name = data.get("name", None)
    if name is not None and not isinstance(name, str):
        raise SchemaError(f"`name` must be a string, got {name!r}")

    return SelfSimilarStructure(
        n_cells=n_cells,
        boundary_labels=tuple(labels),
        cell_tags=tuple(tags),
        gluings=tuple(gluings),
        conductances=conductances,
        base_mass=base_mass,
        alpha=weights["alpha"],
        beta=weights["beta"],
        gamma=common_gamma(weights["alpha"], weights["beta"]),
        name=name,
    )


def load_structure(path: str) -> SelfSimilarStructure:
    LOGGER.info(f"\t+ Loading structure from {path}")
    with open(path, "r") as f:
        return parse_structure(f.read())


def common_gamma(alpha, beta, tolerance: float = HYPOTHESIS_TOLERANCE) -> Optional[float]:
    """(alpha_1 beta_1)^-1 if all gamma_i agree within `tolerance` (relative), else None."""
    if len(alpha) == 0 or len(alpha) != len(beta) or any(a * b <= 0 for a, b in zip(alpha, beta)):
        return None

    gammas = np.array([1.0 / (a * b) for a, b in zip(alpha, beta)])
    if np.max(np.abs(gammas - gammas[0])) > tolerance * abs(gammas[0]):
        return None

    return float(gammas[0])


def _level_one_components(structure: SelfSimilarStructure) -> int:
    """Connected components of N copies of the positive-conductance graph glued at level 1."""
    k = structure.n_labels
    conductances = structure.conductance_matrix()

    rows, cols = [], []
    for cell in range(structure.n_cells):
        for i, j in zip(*np.nonzero(conductances > 0)):
            rows.append(cell * k + i)
            cols.append(cell * k + j)
    for (i, z), (j, w) in structure.gluings:
        rows.append((i - 1) * k + structure.label_index(z))
        cols.append((j - 1) * k + structure.label_index(w))

    size = structure.n_cells * k
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    n_components, _ = connected_components(graph, directed=False)
    return n_components


def validate_structure(structure: SelfSimilarStructure, tolerance: float = HYPOTHESIS_TOLERANCE) -> ValidationReport:
    violations: List[Dict[str, str]] = []
    notes: List[str] = []

    def violate(rule: str, message: str):
        violations.append({"rule": rule, "message": message})

    n_cells, labels = structure.n_cells, structure.boundary_labels

    if n_cells < 2:
        violate("TooFewCells", f"N must be at least 2, got {n_cells}")
    if len(labels) < 2:
        violate("TooFewLabels", f"At least 2 boundary labels are required, got {len(labels)}")

    for label, tag in zip(labels, structure.cell_tags):
        if not 1 <= tag <= n_cells:
            violate("CellTagRange", f"Label {label!r} is tagged with cell {tag} outside 1..{n_cells}")
    for tag in set(structure.cell_tags):
        tagged = [z for z, m in zip(labels, structure.cell_tags) if m == tag]
        if len(tagged) > 1:
            violate("DuplicateFixedPoint", f"Cell {tag} has several fixed point labels {tagged}")

    for (i, z), (j, w) in structure.gluings:
        for cell, label in [(i, z), (j, w)]:
            if label not in labels:
                violate("UnknownLabel", f"Gluing references unknown label {label!r}")
            if not 1 <= cell <= n_cells:
                violate("CellTagRange", f"Gluing references cell {cell} outside 1..{n_cells}")
        if i == j:
            violate("SelfGluing", f"Gluing (({i}, {z}), ({j}, {w})) identifies a cell with itself")

    for (u, v), a in structure.conductances.items():
        for label in (u, v):
            if label not in labels:
                violate("UnknownLabel", f"Conductance references unknown label {label!r}")
        if a < 0:
            violate("NegativeConductance", f"Conductance a[{u},{v}] = {a} is negative")

    for label in labels:
        if label not in structure.base_mass:
            violate("MissingMass", f"No base mass given for label {label!r}")
        elif structure.base_mass[label] <= 0:
            violate("NonpositiveMass", f"Base mass b({label}) = {structure.base_mass[label]} must be positive")
    for label in structure.base_mass:
        if label not in labels:
            violate("UnknownLabel", f"Mass references unknown label {label!r}")

    for i, (a, b) in enumerate(zip(structure.alpha, structure.beta), start=1):
        if not 0 < a < 1:
            violate("AlphaRange", f"alpha_{i} = {a} is not in (0, 1)")
        if not 0 < b < 1:
            violate("BetaRange", f"beta_{i} = {b} is not in (0, 1)")

    if abs(sum(structure.beta) - 1.0) > tolerance:
        violate("BetaSum", f"beta sums to {sum(structure.beta)!r} instead of 1")

    gamma = common_gamma(structure.alpha, structure.beta, tolerance)
    if gamma is None:
        gammas = [1.0 / (a * b) if a * b > 0 else float("inf") for a, b in zip(structure.alpha, structure.beta)]
        violate("HypothesisH", f"beta is not proportional to 1/alpha, gamma_i = {gammas}")

    structurally_sound = not any(v["rule"] in {"UnknownLabel", "CellTagRange", "TooFewLabels"} for v in violations)

    if structurally_sound and len(labels) >= 2:
        positive = structure.conductance_matrix() > 0
        n_components, _ = connected_components(coo_matrix(positive.astype(float)), directed=False)
        if n_components != 1:
            violate("NotIrreducible", f"Positive conductance graph on F has {n_components} components")
        elif _level_one_components(structure) != 1:
            violate("Level1Disconnected", "Level-1 glued graph is not connected")

    if structurally_sound:
        bare = sorted(set(range(1, n_cells + 1)) - set(structure.cell_tags))
        if bare:
            notes.append(f"Cells {bare} contribute no boundary label; accepted since level 1 is connected")

    derived: Dict[str, Optional[float]] = {"gamma": gamma, "K": None}
    if not violations:
        from .operator import norm_bound

        derived["K"] = norm_bound(structure)

    report = ValidationReport(ok=len(violations) == 0, violations=violations, derived=derived, notes=notes)
    report.log()

    return report


def _interval() -> SelfSimilarStructure:
    return SelfSimilarStructure(
        n_cells=2,
        boundary_labels=("q0", "q1"),
        cell_tags=(1, 2),
        gluings=(((1, "q1"), (2, "q0")),),
        conductances={("q0", "q1"): 1.0},
        base_mass={"q0": 0.5, "q1": 0.5},
        alpha=(0.5, 0.5),
        beta=(0.5, 0.5),
        gamma=4.0,
        name="interval",
    )


def _sg3() -> SelfSimilarStructure:
    labels = ("q1", "q2", "q3")
    return SelfSimilarStructure(
        n_cells=3,
        boundary_labels=labels,
        cell_tags=(1, 2, 3),
        gluings=tuple(((i, f"q{j}"), (j, f"q{i}")) for i in range(1, 4) for j in range(i + 1, 4)),
        conductances={(labels[i], labels[j]): 1.0 for i in range(3) for j in range(i + 1, 3)},
        base_mass={label: 1.0 / 3.0 for label in labels},
        alpha=(0.6, 0.6, 0.6),
        beta=(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        gamma=common_gamma((0.6, 0.6, 0.6), (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)),
        name="sg3",
    )


BUILTIN_STRUCTURES = {"interval": _interval, "sg3": _sg3}


def builtin_structure(name: str) -> SelfSimilarStructure:
    if name not in BUILTIN_STRUCTURES:
        raise UnknownName(f"Unknown builtin structure {name!r}. Available structures: {list(BUILTIN_STRUCTURES)}")

    return BUILTIN_STRUCTURES[name]()
