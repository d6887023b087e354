from dataclasses import dataclass, field
from logging import getLogger
from typing import Dict, Optional

from ...analysis import level_operator
from ...artifact_utils import ArtifactMixin, classproperty, save_table
from ...structure import SelfSimilarStructure
from ..base import Task, TaskContext, resolve_word
from .config import AssembleConfig

LOGGER = getLogger("assemble")


@dataclass
class AssembleReport(ArtifactMixin):
    structure: str
    level: int
    word: str
    n_vertices: int
    nnz: int
    omega_scale: float
    norm_bound: float
    total_mass: float
    matrix: Optional[str] = None
    masses: Optional[str] = None
    caps: Dict[str, int] = field(default_factory=dict)
    passed: bool = True

    @classproperty
    def default_filename(cls) -> str:
        return "assemble_report.json"


class AssembleTask(Task[AssembleConfig]):
    NAME = "assemble"

    def run(self, structure: SelfSimilarStructure, context: TaskContext) -> None:
        op = level_operator(structure, self.config.level, resolve_word(self.config.word), context.caps)
        LOGGER.info(f"\t+ Assembled A_<{op.n}> with {op.A.nnz} non-zeros on {op.n_vertices} vertices")

        # canonical csr, so the triplets come out row-major
        A = op.A.tocoo()
        save_table(
            [{"row": int(i), "col": int(j), "value": float(a)} for i, j, a in zip(A.row, A.col, A.data)],
            ["row", "col", "value"],
            self.config.out,
        )
        save_table(
            [
                {"index": v, "mass": float(mass), "btilde": float(btilde)}
                for v, (mass, btilde) in enumerate(zip(op.masses, op.btilde))
            ],
            ["index", "mass", "btilde"],
            self.config.masses,
        )
        self.artifacts += [self.config.out, self.config.masses]

        self.report = AssembleReport(
            structure=structure.name or "structure",
            level=op.n,
            word=str(op.word),
            n_vertices=op.n_vertices,
            nnz=int(op.A.nnz),
            omega_scale=op.omega_scale,
            norm_bound=op.norm_bound,
            total_mass=float(op.masses.sum()),
            matrix=self.config.out,
            masses=self.config.masses,
            caps={"vertices": context.caps.vertices},
        )

    def get_report(self) -> AssembleReport:
        return self.report
