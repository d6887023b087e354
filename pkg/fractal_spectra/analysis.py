from dataclasses import asdict, dataclass, field
from logging import getLogger
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from flatten_dict import flatten
from scipy.spatial.distance import directed_hausdorff

from .artifact_utils import ArtifactMixin, classproperty, to_serializable
from .config import CapsConfig, ToleranceConfig, WordsConfig
from .errors import UsageError
from .launchers.base import Launcher
from .launchers.inline.config import InlineConfig
from .launchers.inline.launcher import InlineLauncher
from .lattice import (
    BlowupWord,
    LatticeLevel,
    build_level,
    check_word,
    embed_base,
    embed_level,
    generate_words,
    predicted_vertex_counts,
)
from .operator import LevelOperator, assemble_level, norm_bound
from .spectra import (
    PointMeasure,
    counting_measure,
    decompose,
    joint_atoms,
    levy_distance,
    nd_counting_measure,
    nd_spectral_measure_delta,
    nd_subspace,
    spectral_measure_delta,
)
from .structure import SelfSimilarStructure

LOGGER = getLogger("analysis")

# Monte Carlo verdicts allow this many standard errors on top of the exact tolerance
MONTE_CARLO_SIGMAS = 5.0


@dataclass
class Verdict:
    check: str
    level: int
    discrepancy: float
    tolerance: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        data = to_serializable(asdict(self))
        data["pass"] = data.pop("passed")
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Verdict":
        data = dict(data)
        data["passed"] = data.pop("pass")
        return cls(**data)

    def log(self):
        status = "PASS" if self.passed else "FAIL"
        LOGGER.info(
            f"\t+ [{status}] {self.check} at level {self.level}: "
            f"discrepancy {self.discrepancy:.3e} (tolerance {self.tolerance:.3e})"
        )


@dataclass
class LevelRecord:
    n: int
    n_vertices: int
    summary: Dict[str, Any] = field(default_factory=dict)
    # Levy distance to the previous record
    distance: Optional[float] = None


@dataclass
class ConvergenceReport(ArtifactMixin):
    check: str
    structure: str
    records: List[LevelRecord] = field(default_factory=list)
    verdicts: List[Verdict] = field(default_factory=list)
    tolerances: Dict[str, Any] = field(default_factory=dict)
    words: Dict[str, Any] = field(default_factory=dict)
    caps: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        levels = [record.n for record in self.records]
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"Report levels must be strictly increasing, got {levels}")
        if any(record.distance is not None and record.distance < 0 for record in self.records):
            raise ValueError("Report distances must be non-negative")

    @property
    def passed(self) -> bool:
        return all(verdict.passed for verdict in self.verdicts)

    def to_dict(self, flat=False) -> Dict[str, Any]:
        data = to_serializable(asdict(self))
        data["verdicts"] = [verdict.to_dict() for verdict in self.verdicts]
        data["passed"] = self.passed

        if flat:
            data = flatten(data, reducer="dot")

        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ConvergenceReport":
        data = {k: v for k, v in data.items() if k != "passed"}
        data["records"] = [LevelRecord(**record) for record in data.get("records", [])]
        data["verdicts"] = [Verdict.from_dict(verdict) for verdict in data.get("verdicts", [])]
        return cls(**data)

    def log(self):
        LOGGER.info(f"+ {self.check} report for {self.structure}:")
        for record in self.records:
            distance = "" if record.distance is None else f", distance to previous level {record.distance:.6g}"
            LOGGER.info(f"\t+ level {record.n}: {record.n_vertices} vertices{distance}")
        for verdict in self.verdicts:
            verdict.log()

    @classproperty
    def default_filename(cls) -> str:
        return "convergence_report.json"


def _defaults(
    tolerances: Optional[ToleranceConfig], caps: Optional[CapsConfig], launcher: Optional[Launcher]
) -> Tuple[ToleranceConfig, CapsConfig, Launcher]:
    return (
        tolerances if tolerances is not None else ToleranceConfig(),
        caps if caps is not None else CapsConfig(),
        launcher if launcher is not None else InlineLauncher(InlineConfig()),
    )


def _resolved_tolerances(tolerances: ToleranceConfig, K: float) -> Dict[str, Any]:
    return {
        **asdict(tolerances),
        "cluster": tolerances.cluster_tol(K),
        "match": tolerances.match_tol(K),
        "K": K,
    }


def reference_word(s: SelfSimilarStructure, n: int) -> BlowupWord:
    return BlowupWord((1,) * n)


def level_operator(
    s: SelfSimilarStructure, n: int, word: Optional[BlowupWord] = None, caps: Optional[CapsConfig] = None
) -> LevelOperator:
    caps = caps if caps is not None else CapsConfig()
    level = build_level(s, n, cap=caps.vertices)
    return assemble_level(s, level, word if word is not None else reference_word(s, n))


def select_words(
    s: SelfSimilarStructure, n: int, words: Optional[WordsConfig], caps: CapsConfig
) -> Tuple[List[BlowupWord], Dict[str, Any]]:
    """The words of a sweep (all N^n words unless `words` says otherwise) and their provenance."""
    mode = words.mode if words is not None and words.mode is not None else "enumerate"

    if mode == "word":
        selected = [BlowupWord(tuple(words.word))]
        check_word(s, selected[0], n)
    elif mode == "enumerate":
        selected = generate_words(s, n, "enumerate", cap=caps.words)
    else:
        selected = generate_words(s, n, "sample", count=words.samples, seed=words.seed, cap=caps.words)

    info = {"mode": mode, "count": len(selected), "seed": words.seed if words is not None else None}
    if mode == "word":
        info["word"] = str(selected[0])

    return selected, info


def _check_positive_level(n: int, what: str) -> None:
    if n < 1:
        raise UsageError(f"{what} requires a level n >= 1, got {n}")


# DENSITIES


def density_of_states(
    s: SelfSimilarStructure,
    n: int,
    bc: str = "neumann",
    word: Optional[BlowupWord] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> PointMeasure:
    """N^-n times the eigenvalue counting measure of the level n operator."""
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    op = level_operator(s, n, word, caps)
    d = decompose(op, bc, cap=caps.dense)
    return counting_measure(d, scale=float(s.n_cells) ** -n, cluster_tol=tolerances.cluster_tol(op.norm_bound))


def nd_density(
    s: SelfSimilarStructure,
    n: int,
    word: Optional[BlowupWord] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> PointMeasure:
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    op = level_operator(s, n, word, caps)
    return nd_counting_measure(
        op,
        scale=float(s.n_cells) ** -n,
        residual_tol=tolerances.residual,
        cluster_tol=tolerances.cluster_tol(op.norm_bound),
        cap=caps.dense,
    )


def dos_convergence(
    s: SelfSimilarStructure,
    levels: Sequence[int],
    bc: str = "neumann",
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> Tuple[ConvergenceReport, List[PointMeasure]]:
    """Densities of states over increasing levels, with the Levy distance between consecutive levels."""
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    levels = sorted(set(levels))
    K = norm_bound(s)

    records, verdicts, measures = [], [], []
    for n in levels:
        LOGGER.info(f"\t+ Computing {bc} density of states at level {n}")
        op = level_operator(s, n, None, caps)
        d = decompose(op, bc, cap=caps.dense)
        measure = counting_measure(d, scale=float(s.n_cells) ** -n, cluster_tol=tolerances.cluster_tol(K))

        distance = levy_distance(measures[-1], measure) if measures else None
        records.append(LevelRecord(n=n, n_vertices=op.n_vertices, summary=measure.summary(), distance=distance))

        expected = d.size / float(s.n_cells) ** n
        discrepancy = abs(measure.total_mass - expected)
        tolerance = tolerances.identity * max(expected, 1.0)
        verdicts.append(
            Verdict(
                check="dos-mass",
                level=n,
                discrepancy=discrepancy,
                tolerance=tolerance,
                passed=discrepancy <= tolerance,
                details={"expected_mass": expected, "bc": bc},
            )
        )
        measures.append(measure)

    report = ConvergenceReport(
        check="dos",
        structure=s.name or "structure",
        records=records,
        verdicts=verdicts,
        tolerances=_resolved_tolerances(tolerances, K),
        words={"mode": "reference", "count": 1, "seed": None},
    )
    return report, measures


def nd_density_convergence(
    s: SelfSimilarStructure,
    levels: Sequence[int],
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> Tuple[ConvergenceReport, List[PointMeasure]]:
    """
    N-D densities over increasing levels. Their total mass N^-n dim E^ND_n can only grow with n,
    since every N-D eigenfunction is copied into the N cells of the next level.
    """
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    levels = sorted(set(levels))
    _check_positive_level(levels[0], "The Neumann-Dirichlet density")
    K = norm_bound(s)

    records, verdicts, measures = [], [], []
    for n in levels:
        LOGGER.info(f"\t+ Computing Neumann-Dirichlet density at level {n}")
        measure = nd_density(s, n, None, tolerances, caps)

        distance = levy_distance(measures[-1], measure) if measures else None
        records.append(
            LevelRecord(
                n=n,
                n_vertices=predicted_vertex_counts(s, n)[-1],
                summary=measure.summary(),
                distance=distance,
            )
        )

        if measures:
            previous = measures[-1].total_mass
            discrepancy = max(previous - measure.total_mass, 0.0)
            tolerance = tolerances.identity * max(previous, 1.0)
            verdicts.append(
                Verdict(
                    check="nd-mass-monotone",
                    level=n,
                    discrepancy=discrepancy,
                    tolerance=tolerance,
                    passed=discrepancy <= tolerance,
                    details={"previous_mass": previous, "mass": measure.total_mass},
                )
            )
        measures.append(measure)

    report = ConvergenceReport(
        check="nd-dos",
        structure=s.name or "structure",
        records=records,
        verdicts=verdicts,
        tolerances=_resolved_tolerances(tolerances, K),
        words={"mode": "reference", "count": 1, "seed": None},
    )
    return report, measures


# EXPECTATION IDENTITIES


def _identity_worker(
    word: BlowupWord,
    s: SelfSimilarStructure,
    level: LatticeLevel,
    nd: bool,
    tolerances: ToleranceConfig,
    caps: CapsConfig,
) -> PointMeasure:
    """sum over the embedded base vertices x_z of b(z) / b_n(x_z)^2 sigma_n(delta_{x_z}) for one word."""
    op = assemble_level(s, level, word)
    cluster_tol = tolerances.cluster_tol(op.norm_bound)
    embedded = embed_base(level, word)

    if nd:
        subspace = nd_subspace(op, residual_tol=tolerances.residual, cluster_tol=cluster_tol, cap=caps.dense)
    else:
        d = decompose(op, "neumann", cap=caps.dense)

    measures = []
    for label, x in embedded.items():
        if nd:
            sigma = nd_spectral_measure_delta(op, subspace, x)
        else:
            sigma = spectral_measure_delta(op, d, x, cluster_tol)
        measures.append(sigma.scaled(s.base_mass[label] / op.masses[x] ** 2))

    return PointMeasure.aggregate(measures, cluster_tol)


def _word_statistics(
    measures: Sequence[PointMeasure], target: PointMeasure, tol: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Joint atoms, mean weight over words, target weight and standard error of the mean."""
    centers, table = joint_atoms(list(measures) + [target], tol)
    per_word, target_weights = table[:-1], table[-1]

    mean = per_word.mean(axis=0) if len(measures) else np.zeros(len(centers))
    if len(measures) > 1:
        stderr = per_word.std(axis=0, ddof=1) / np.sqrt(len(measures))
    else:
        stderr = np.zeros(len(centers))

    return centers, mean, target_weights, stderr


def _verify_expectation_identity(
    s: SelfSimilarStructure,
    n: int,
    nd: bool,
    words: Optional[WordsConfig],
    tolerances: Optional[ToleranceConfig],
    caps: Optional[CapsConfig],
    launcher: Optional[Launcher],
) -> ConvergenceReport:
    tolerances, caps, launcher = _defaults(tolerances, caps, launcher)
    check = "nd-identity" if nd else "identity"
    if nd:
        _check_positive_level(n, "The Neumann-Dirichlet identity")

    level = build_level(s, n, cap=caps.vertices)
    op = assemble_level(s, level, reference_word(s, n))
    K = op.norm_bound
    cluster_tol = tolerances.cluster_tol(K)
    scale = float(s.n_cells) ** -n

    if nd:
        target = nd_counting_measure(
            op, scale=scale, residual_tol=tolerances.residual, cluster_tol=cluster_tol, cap=caps.dense
        )
    else:
        target = counting_measure(decompose(op, "neumann", cap=caps.dense), scale=scale, cluster_tol=cluster_tol)

    selected, info = select_words(s, n, words, caps)
    LOGGER.info(f"\t+ Averaging the {check} over {len(selected)} words ({info['mode']})")
    measures = launcher.map(_identity_worker, selected, s, level, nd, tolerances, caps)

    centers, mean, target_weights, stderr = _word_statistics(measures, target, cluster_tol)
    differences = np.abs(mean - target_weights)

    exact_tolerance = tolerances.identity * target.total_mass
    if info["mode"] == "sample":
        allowed = exact_tolerance + MONTE_CARLO_SIGMAS * stderr
    else:
        allowed = np.full(len(centers), exact_tolerance)

    discrepancy = float(differences.max()) if len(differences) else 0.0
    tolerance = float(allowed.max()) if len(allowed) else exact_tolerance
    failing = np.nonzero(differences > allowed)[0]
    worst = int(np.argmax(differences)) if len(differences) else None

    verdict = Verdict(
        check=check,
        level=n,
        discrepancy=discrepancy,
        tolerance=tolerance,
        passed=len(failing) == 0,
        details={
            "target_mass": target.total_mass,
            "average_mass": float(mean.sum()),
            "n_atoms": len(centers),
            "worst_lambda": float(centers[worst]) if worst is not None else None,
            "max_stderr": float(stderr.max()) if len(stderr) else 0.0,
            "failing_lambdas": [float(centers[i]) for i in failing],
        },
    )

    return ConvergenceReport(
        check=check,
        structure=s.name or "structure",
        records=[LevelRecord(n=n, n_vertices=level.n_vertices, summary=target.summary())],
        verdicts=[verdict],
        tolerances=_resolved_tolerances(tolerances, K),
        words=info,
    )


def verify_state_density_identity(
    s: SelfSimilarStructure,
    n: int,
    words: Optional[WordsConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
    launcher: Optional[Launcher] = None,
) -> ConvergenceReport:
    """
    Checks that the average over blow-up words of
    sum_{x in F_<0>} b_0(x) / b_n(x)^2 sigma_n(delta_x)
    equals N^-n nu_n atom by atom. The identity is exact when all words are enumerated.
    """
    return _verify_expectation_identity(s, n, False, words, tolerances, caps, launcher)


def verify_nd_identity(
    s: SelfSimilarStructure,
    n: int,
    words: Optional[WordsConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
    launcher: Optional[Launcher] = None,
) -> ConvergenceReport:
    """Same identity restricted to the Neumann-Dirichlet eigenspaces, against N^-n nu^ND_n."""
    return _verify_expectation_identity(s, n, True, words, tolerances, caps, launcher)


def verify_trace_identity(
    s: SelfSimilarStructure,
    n: int,
    word: Optional[BlowupWord] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> ConvergenceReport:
    """sum_x sigma(delta_x) / b_n(x) reproduces the counting measure nu."""
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    op = level_operator(s, n, word, caps)
    cluster_tol = tolerances.cluster_tol(op.norm_bound)

    d = decompose(op, "neumann", cap=caps.dense)
    nu = counting_measure(d, cluster_tol=cluster_tol)
    traced = PointMeasure.aggregate(
        [spectral_measure_delta(op, d, x, cluster_tol).scaled(1.0 / op.masses[x]) for x in range(op.n_vertices)],
        cluster_tol,
    )

    _, table = joint_atoms([traced, nu], cluster_tol)
    discrepancy = float(np.max(np.abs(table[0] - table[1]))) if table.shape[1] else 0.0
    tolerance = tolerances.identity * max(nu.total_mass, 1.0)

    return ConvergenceReport(
        check="trace",
        structure=s.name or "structure",
        records=[LevelRecord(n=n, n_vertices=op.n_vertices, summary=nu.summary())],
        verdicts=[
            Verdict(
                check="trace",
                level=n,
                discrepancy=discrepancy,
                tolerance=tolerance,
                passed=discrepancy <= tolerance,
                details={"traced_mass": traced.total_mass, "counting_mass": nu.total_mass},
            )
        ],
        tolerances=_resolved_tolerances(tolerances, op.norm_bound),
        words={"mode": "word", "count": 1, "seed": None, "word": str(op.word)},
    )


# NEUMANN-DIRICHLET STRUCTURE


def compare_replication(
    coarse: PointMeasure, fine: PointMeasure, n_cells: int, match_tol: float, level: int = 0
) -> Verdict:
    """Every atom (lambda, m) of the coarse measure must carry at least N m in the fine one."""
    shortfalls = []
    for location, weight in zip(coarse.locations, coarse.weights):
        found = fine.mass_at(location, match_tol)
        required = n_cells * weight
        if found < required - 0.5:
            shortfalls.append({"lambda": float(location), "required": float(required), "found": float(found)})

    discrepancy = max([item["required"] - item["found"] for item in shortfalls], default=0.0)
    return Verdict(
        check="replication",
        level=level,
        discrepancy=float(discrepancy),
        tolerance=0.0,
        passed=len(shortfalls) == 0,
        details={"missing": shortfalls, "coarse_atoms": coarse.n_atoms, "fine_atoms": fine.n_atoms},
    )


def verify_nd_replication(
    s: SelfSimilarStructure,
    n: int,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> ConvergenceReport:
    """nu^ND_{n+1} >= N nu^ND_n as measures (each N-D eigenfunction can be copied into N cells)."""
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    _check_positive_level(n, "Replication")
    K = norm_bound(s)

    records, measures = [], []
    for m in (n, n + 1):
        op = level_operator(s, m, None, caps)
        measure = nd_counting_measure(
            op, residual_tol=tolerances.residual, cluster_tol=tolerances.cluster_tol(K), cap=caps.dense
        )
        records.append(LevelRecord(n=m, n_vertices=op.n_vertices, summary=measure.summary()))
        measures.append(measure)

    return ConvergenceReport(
        check="replication",
        structure=s.name or "structure",
        records=records,
        verdicts=[compare_replication(measures[0], measures[1], s.n_cells, tolerances.match_tol(K), level=n)],
        tolerances=_resolved_tolerances(tolerances, K),
        words={"mode": "reference", "count": 1, "seed": None},
    )


def counting_gap(neumann: np.ndarray, dirichlet: np.ndarray, tol: float) -> int:
    """sup over lambda of |#{neumann >= lambda} - #{dirichlet >= lambda}|, ties resolved by joint clustering."""
    values = np.concatenate([neumann, dirichlet])
    owners = np.concatenate([np.zeros(len(neumann), dtype=int), np.ones(len(dirichlet), dtype=int)])
    order = np.argsort(values, kind="stable")[::-1]
    values, owners = values[order], owners[order]

    gap, neumann_count, dirichlet_count, start = 0, 0, 0, 0
    while start < len(values):
        end = start + 1
        while end < len(values) and values[end - 1] - values[end] <= tol:
            end += 1
        neumann_count += int(np.sum(owners[start:end] == 0))
        dirichlet_count += int(np.sum(owners[start:end] == 1))
        gap = max(gap, abs(neumann_count - dirichlet_count))
        start = end

    return gap


def interlacing_check(
    s: SelfSimilarStructure,
    n: int,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> ConvergenceReport:
    """The Neumann and Dirichlet counting functions differ by at most |boundary| = |F| everywhere."""
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    _check_positive_level(n, "Interlacing")

    op = level_operator(s, n, None, caps)
    neumann = decompose(op, "neumann", cap=caps.dense).lambdas
    dirichlet = decompose(op, "dirichlet", cap=caps.dense).lambdas
    gap = counting_gap(neumann, dirichlet, tolerances.cluster_tol(op.norm_bound))
    bound = len(op.level.boundary)

    return ConvergenceReport(
        check="interlacing",
        structure=s.name or "structure",
        records=[
            LevelRecord(
                n=n, n_vertices=op.n_vertices, summary={"neumann": len(neumann), "dirichlet": len(dirichlet)}
            )
        ],
        verdicts=[
            Verdict(
                check="interlacing",
                level=n,
                discrepancy=float(gap),
                tolerance=float(bound),
                passed=gap <= bound,
                details={"max_gap": gap, "boundary_size": bound},
            )
        ],
        tolerances=_resolved_tolerances(tolerances, op.norm_bound),
        words={"mode": "reference", "count": 1, "seed": None},
    )


def _deficiency_records(
    s: SelfSimilarStructure, n_max: int, tolerances: ToleranceConfig, caps: CapsConfig
) -> List[LevelRecord]:
    _check_positive_level(n_max, "Deficiency")
    K = norm_bound(s)

    records = []
    for n in range(1, n_max + 1):
        op = level_operator(s, n, None, caps)
        subspace = nd_subspace(
            op, residual_tol=tolerances.residual, cluster_tol=tolerances.cluster_tol(K), cap=caps.dense
        )
        deficiency = (op.n_vertices - subspace.dimension) / float(s.n_cells) ** n
        LOGGER.info(f"\t+ Level {n}: dim E^ND = {subspace.dimension}, deficiency {deficiency:.12g}")
        records.append(
            LevelRecord(
                n=n,
                n_vertices=op.n_vertices,
                summary={
                    "nd_dimension": subspace.dimension,
                    "deficiency": deficiency,
                    "max_boundary_residual": subspace.max_residual,
                },
            )
        )
    return records


def nd_deficiency(
    s: SelfSimilarStructure,
    n_max: int,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> List[float]:
    """d_n = (|V_n| - dim E^ND_n) / N^n for n = 1..n_max."""
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    return [record.summary["deficiency"] for record in _deficiency_records(s, n_max, tolerances, caps)]


def verify_deficiency(
    s: SelfSimilarStructure,
    n_max: int,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
) -> ConvergenceReport:
    tolerances, caps, _ = _defaults(tolerances, caps, None)
    records = _deficiency_records(s, n_max, tolerances, caps)
    sequence = [record.summary["deficiency"] for record in records]
    increments = [b - a for a, b in zip(sequence, sequence[1:])]

    return ConvergenceReport(
        check="deficiency",
        structure=s.name or "structure",
        records=records,
        verdicts=[
            Verdict(
                check="deficiency",
                level=n_max,
                discrepancy=max([0.0] + increments),
                tolerance=0.0,
                passed=all(increment < 0 for increment in increments) and all(d >= 0 for d in sequence),
                details={"sequence": sequence},
            )
        ],
        tolerances=_resolved_tolerances(tolerances, norm_bound(s)),
        words={"mode": "reference", "count": 1, "seed": None},
    )


def _projection_worker(
    word: BlowupWord,
    s: SelfSimilarStructure,
    coarse: LatticeLevel,
    fine: LatticeLevel,
    tolerances: ToleranceConfig,
    caps: CapsConfig,
) -> Tuple[float, float, int]:
    """||P f||^2_{b_n} on the complement of E^ND_n, ||f||^2_{b_k0} and dim E^ND_n for one word."""
    op = assemble_level(s, fine, word)
    subspace = nd_subspace(
        op, residual_tol=tolerances.residual, cluster_tol=tolerances.cluster_tol(op.norm_bound), cap=caps.dense
    )
    coarse_op = assemble_level(s, coarse, BlowupWord(word.letters[: coarse.n]))

    f = np.zeros(coarse.n_vertices)
    f[list(coarse.interior)] = 1.0 / np.sqrt(len(coarse.interior))
    coarse_norm = float(np.sum(coarse_op.masses * f**2))

    extended = np.zeros(fine.n_vertices)
    extended[embed_level(coarse, fine, word)] = f

    basis = subspace.basis()
    projected = extended - basis @ (basis.T @ (op.masses * extended))
    return float(np.sum(op.masses * projected**2)), coarse_norm, subspace.dimension


def verify_projection_bound(
    s: SelfSimilarStructure,
    n: int,
    k0: int = 1,
    words: Optional[WordsConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
    launcher: Optional[Launcher] = None,
) -> ConvergenceReport:
    """
    For f vanishing on the boundary of F_<k0> (here its normalised interior indicator) placed in
    F_<n> by the blow-up, E ||P f||^2_{b_n} <= dim(complement of E^ND_n) / N^(n-k0) E ||f||^2_{b_k0},
    where P projects on the b_n-orthogonal complement of the N-D eigenfunctions.
    """
    tolerances, caps, launcher = _defaults(tolerances, caps, launcher)
    if not 1 <= k0 <= n:
        raise UsageError(f"The projection bound requires 1 <= k0 <= n, got k0={k0} and n={n}")

    coarse = build_level(s, k0, cap=caps.vertices)
    fine = build_level(s, n, cap=caps.vertices)
    if not coarse.interior:
        raise UsageError(f"Level {k0} has no interior vertex to support a test function")

    selected, info = select_words(s, n, words, caps)
    results = launcher.map(_projection_worker, selected, s, coarse, fine, tolerances, caps)

    projected = np.array([r[0] for r in results])
    coarse_norms = np.array([r[1] for r in results])
    complement = fine.n_vertices - results[0][2]

    lhs = float(projected.mean())
    rhs = complement / float(s.n_cells) ** (n - k0) * float(coarse_norms.mean())
    tolerance = tolerances.identity * max(rhs, 1e-300)
    if info["mode"] == "sample" and len(projected) > 1:
        tolerance += MONTE_CARLO_SIGMAS * float(projected.std(ddof=1) / np.sqrt(len(projected)))

    K = norm_bound(s)
    return ConvergenceReport(
        check="projection",
        structure=s.name or "structure",
        records=[LevelRecord(n=n, n_vertices=fine.n_vertices, summary={"k0": k0, "complement_dimension": complement})],
        verdicts=[
            Verdict(
                check="projection",
                level=n,
                discrepancy=max(0.0, lhs - rhs),
                tolerance=tolerance,
                passed=lhs <= rhs + tolerance,
                details={"expected_projection": lhs, "bound": rhs, "k0": k0},
            )
        ],
        tolerances=_resolved_tolerances(tolerances, K),
        words=info,
    )


# WORD SWEEPS


def _spectrum_worker(
    word: BlowupWord, s: SelfSimilarStructure, level: LatticeLevel, caps: CapsConfig
) -> Tuple[np.ndarray, np.ndarray]:
    op = assemble_level(s, level, word)
    neumann = decompose(op, "neumann", cap=caps.dense).lambdas
    dirichlet = decompose(op, "dirichlet", cap=caps.dense).lambdas if level.interior else np.zeros(0)
    return neumann, dirichlet


def verify_norm_bound(
    s: SelfSimilarStructure,
    n: int,
    words: Optional[WordsConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
    launcher: Optional[Launcher] = None,
) -> ConvergenceReport:
    """Every Neumann and Dirichlet eigenvalue of every swept word lies in [-K, 0]."""
    tolerances, caps, launcher = _defaults(tolerances, caps, launcher)
    level = build_level(s, n, cap=caps.vertices)
    K = norm_bound(s)

    selected, info = select_words(s, n, words, caps)
    spectra = launcher.map(_spectrum_worker, selected, s, level, caps)

    values = np.concatenate([np.concatenate([neumann, dirichlet]) for neumann, dirichlet in spectra])
    discrepancy = max(0.0, float(values.max()), float((-K - values).max()))
    tolerance = tolerances.cluster_tol(K)

    return ConvergenceReport(
        check="norm-bound",
        structure=s.name or "structure",
        records=[
            LevelRecord(
                n=n, n_vertices=level.n_vertices, summary={"min": float(values.min()), "max": float(values.max())}
            )
        ],
        verdicts=[
            Verdict(
                check="norm-bound",
                level=n,
                discrepancy=discrepancy,
                tolerance=tolerance,
                passed=discrepancy <= tolerance,
                details={"K": K},
            )
        ],
        tolerances=_resolved_tolerances(tolerances, K),
        words=info,
    )


def verify_word_invariance(
    s: SelfSimilarStructure,
    n: int,
    words: Optional[WordsConfig] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
    launcher: Optional[Launcher] = None,
) -> ConvergenceReport:
    """Sorted Neumann spectra agree across words: the word scales A_<n> and b_<n> by the same factor."""
    tolerances, caps, launcher = _defaults(tolerances, caps, launcher)
    level = build_level(s, n, cap=caps.vertices)
    K = norm_bound(s)

    selected, info = select_words(s, n, words, caps)
    spectra = launcher.map(_spectrum_worker, selected, s, level, caps)

    reference = spectra[0][0]
    discrepancy = max(float(np.max(np.abs(neumann - reference))) for neumann, _ in spectra)
    tolerance = tolerances.invariance * max(float(np.max(np.abs(reference))), 1.0)

    return ConvergenceReport(
        check="word-invariance",
        structure=s.name or "structure",
        records=[LevelRecord(n=n, n_vertices=level.n_vertices, summary={"n_eigenvalues": len(reference)})],
        verdicts=[
            Verdict(
                check="word-invariance",
                level=n,
                discrepancy=discrepancy,
                tolerance=tolerance,
                passed=discrepancy <= tolerance,
                details={"reference_word": str(selected[0])},
            )
        ],
        tolerances=_resolved_tolerances(tolerances, K),
        words=info,
    )


def _overlap_worker(
    word: BlowupWord,
    s: SelfSimilarStructure,
    level: LatticeLevel,
    tolerances: ToleranceConfig,
    caps: CapsConfig,
) -> List[np.ndarray]:
    """Supports of sigma_n(delta_x) for the embedded base vertices, in label order."""
    op = assemble_level(s, level, word)
    d = decompose(op, "neumann", cap=caps.dense)
    cluster_tol = tolerances.cluster_tol(op.norm_bound)
    return [spectral_measure_delta(op, d, x, cluster_tol).support for x in embed_base(level, word).values()]


def hausdorff_distance(u: np.ndarray, v: np.ndarray) -> float:
    if len(u) == 0 and len(v) == 0:
        return 0.0
    if len(u) == 0 or len(v) == 0:
        return float("inf")
    u, v = np.asarray(u, dtype=float).reshape(-1, 1), np.asarray(v, dtype=float).reshape(-1, 1)
    return float(max(directed_hausdorff(u, v)[0], directed_hausdorff(v, u)[0]))


def spectrum_overlap(
    s: SelfSimilarStructure,
    n: int,
    words: Optional[Sequence[BlowupWord]] = None,
    tolerances: Optional[ToleranceConfig] = None,
    caps: Optional[CapsConfig] = None,
    launcher: Optional[Launcher] = None,
    words_info: Optional[Dict[str, Any]] = None,
) -> ConvergenceReport:
    """
    Compares the supports of sigma_n(delta_x), x in the embedded F_<0>, across blow-up words and
    against the support of nu_n. Containment in supp nu_n is the verdict, distances are reported.
    """
    tolerances, caps, launcher = _defaults(tolerances, caps, launcher)
    level = build_level(s, n, cap=caps.vertices)
    if words is None:
        words, words_info = select_words(s, n, None, caps)
    for word in words:
        check_word(s, word, n)

    op = assemble_level(s, level, reference_word(s, n))
    K = op.norm_bound
    nu = counting_measure(decompose(op, "neumann", cap=caps.dense), cluster_tol=tolerances.cluster_tol(K))
    nu_support = nu.support

    supports = launcher.map(_overlap_worker, list(words), s, level, tolerances, caps)

    per_label = {}
    for z, label in enumerate(s.boundary_labels):
        label_supports = [word_supports[z] for word_supports in supports]
        across = max(
            [hausdorff_distance(a, b) for i, a in enumerate(label_supports) for b in label_supports[i + 1 :]],
            default=0.0,
        )
        to_nu = max(hausdorff_distance(support, nu_support) for support in label_supports)
        per_label[label] = {"across_words": across, "to_nu": to_nu}

    outside = max(
        float(directed_hausdorff(support.reshape(-1, 1), nu_support.reshape(-1, 1))[0])
        for word_supports in supports
        for support in word_supports
        if len(support)
    )
    tolerance = tolerances.match_tol(K)

    return ConvergenceReport(
        check="overlap",
        structure=s.name or "structure",
        records=[LevelRecord(n=n, n_vertices=level.n_vertices, summary={"nu_atoms": len(nu_support)})],
        verdicts=[
            Verdict(
                check="overlap",
                level=n,
                discrepancy=outside,
                tolerance=tolerance,
                passed=outside <= tolerance,
                details={
                    "max_across_words": max(item["across_words"] for item in per_label.values()),
                    "max_to_nu": max(item["to_nu"] for item in per_label.values()),
                    "labels": per_label,
                },
            )
        ],
        tolerances=_resolved_tolerances(tolerances, K),
        words=words_info if words_info is not None else {"mode": "given", "count": len(words), "seed": None},
    )
