from dataclasses import asdict
from logging import getLogger

from ...analysis import ConvergenceReport, dos_convergence, nd_density_convergence
from ...structure import SelfSimilarStructure
from ..base import MEASURE_COLUMNS, Task, TaskContext, measure_rows
from .config import DosConfig

LOGGER = getLogger("dos")


class DosTask(Task[DosConfig]):
    NAME = "dos"

    def run(self, structure: SelfSimilarStructure, context: TaskContext) -> None:
        if self.config.nd:
            self.report, measures = nd_density_convergence(
                structure, self.config.levels, tolerances=context.tolerances, caps=context.caps
            )
            kind = "nd"
        else:
            self.report, measures = dos_convergence(
                structure, self.config.levels, bc=self.config.bc, tolerances=context.tolerances, caps=context.caps
            )
            kind = self.config.bc

        rows = []
        for record, measure in zip(self.report.records, measures):
            rows += measure_rows(measure, kind, level=record.n)

        self.save_measures(rows, self.config.csv, self.config.gnuplot, columns=["level"] + MEASURE_COLUMNS)
        self.report.caps = asdict(context.caps)
        self.report.log()

    def get_report(self) -> ConvergenceReport:
        return self.report
