from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, Optional

from ...analysis import level_operator
from ...artifact_utils import ArtifactMixin, classproperty
from ...spectra import counting_measure, decompose
from ...structure import SelfSimilarStructure
from ..base import Task, TaskContext, measure_rows, resolve_word
from .config import SpectrumConfig

LOGGER = getLogger("spectrum")


@dataclass
class SpectrumReport(ArtifactMixin):
    structure: str
    level: int
    word: str
    bc: str
    mass: str
    n_eigenvalues: int
    measure: Dict[str, Any] = field(default_factory=dict)
    csv: Optional[str] = None
    tolerances: Dict[str, Any] = field(default_factory=dict)
    caps: Dict[str, int] = field(default_factory=dict)
    passed: bool = True

    @classproperty
    def default_filename(cls) -> str:
        return "spectrum_report.json"


class SpectrumTask(Task[SpectrumConfig]):
    NAME = "spectrum"

    def run(self, structure: SelfSimilarStructure, context: TaskContext) -> None:
        op = level_operator(structure, self.config.level, resolve_word(self.config.word), context.caps)
        d = decompose(op, self.config.bc, cap=context.caps.dense, mass=self.config.mass)

        cluster_tol = context.tolerances.cluster_tol(d.norm_bound)
        measure = counting_measure(d, cluster_tol=cluster_tol)
        measure.log(prefix=self.config.bc)

        self.save_measures(measure_rows(measure, self.config.bc), self.config.csv, self.config.gnuplot)

        self.report = SpectrumReport(
            structure=structure.name or "structure",
            level=op.n,
            word=str(op.word),
            bc=self.config.bc,
            mass=d.mass_used,
            n_eigenvalues=d.size,
            measure=measure.summary(),
            csv=self.config.csv,
            tolerances={"cluster": cluster_tol, "K": d.norm_bound},
            caps={"vertices": context.caps.vertices, "dense": context.caps.dense},
        )

    def get_report(self) -> SpectrumReport:
        return self.report
