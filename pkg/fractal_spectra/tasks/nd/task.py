from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, List, Optional

from ...analysis import level_operator
from ...artifact_utils import ArtifactMixin, classproperty
from ...spectra import nd_counting_measure, nd_subspace
from ...structure import SelfSimilarStructure
from ..base import Task, TaskContext, measure_rows, resolve_word
from .config import NDConfig

LOGGER = getLogger("nd")


@dataclass
class NDReport(ArtifactMixin):
    structure: str
    level: int
    word: str
    n_vertices: int
    dimension: int
    # (|V_n| - dim E^ND_n) / N^n
    deficiency: float
    pairs: List[Dict[str, Any]] = field(default_factory=list)
    max_residual: float = 0.0
    csv: Optional[str] = None
    tolerances: Dict[str, Any] = field(default_factory=dict)
    caps: Dict[str, int] = field(default_factory=dict)
    passed: bool = True

    @classproperty
    def default_filename(cls) -> str:
        return "nd_report.json"


class NDTask(Task[NDConfig]):
    NAME = "nd"

    def run(self, structure: SelfSimilarStructure, context: TaskContext) -> None:
        op = level_operator(structure, self.config.level, resolve_word(self.config.word), context.caps)

        cluster_tol = context.tolerances.cluster_tol(op.norm_bound)
        nd = nd_subspace(op, residual_tol=context.tolerances.residual, cluster_tol=cluster_tol, cap=context.caps.dense)
        measure = nd_counting_measure(op, nd=nd)
        measure.log(prefix="nd")

        self.save_measures(measure_rows(measure, "nd"), self.config.csv, self.config.gnuplot)

        deficiency = (op.n_vertices - nd.dimension) / float(structure.n_cells) ** op.n
        LOGGER.info(f"\t+ dim E^ND_{op.n} = {nd.dimension}, deficiency {deficiency:.12g}")

        self.report = NDReport(
            structure=structure.name or "structure",
            level=op.n,
            word=str(op.word),
            n_vertices=op.n_vertices,
            dimension=nd.dimension,
            deficiency=deficiency,
            pairs=[{"lambda": pair.lambda_, "multiplicity": pair.multiplicity} for pair in nd.pairs],
            max_residual=nd.max_residual,
            csv=self.config.csv,
            tolerances={"cluster": cluster_tol, "residual": context.tolerances.residual, "K": op.norm_bound},
            caps={"vertices": context.caps.vertices, "dense": context.caps.dense},
        )

    def get_report(self) -> NDReport:
        return self.report
