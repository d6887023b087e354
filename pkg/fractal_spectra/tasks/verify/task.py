from dataclasses import asdict
from logging import getLogger

from ...analysis import (
    ConvergenceReport,
    interlacing_check,
    select_words,
    spectrum_overlap,
    verify_deficiency,
    verify_nd_identity,
    verify_nd_replication,
    verify_norm_bound,
    verify_projection_bound,
    verify_state_density_identity,
    verify_trace_identity,
    verify_word_invariance,
)
from ...structure import SelfSimilarStructure
from ..base import Task, TaskContext, resolve_word
from .config import VerifyConfig

LOGGER = getLogger("verify")


class VerifyTask(Task[VerifyConfig]):
    NAME = "verify"

    def run(self, structure: SelfSimilarStructure, context: TaskContext) -> None:
        check, n, words = self.config.check, self.config.level, self.config.words
        shared = {"tolerances": context.tolerances, "caps": context.caps}
        sweep = {**shared, "launcher": context.launcher}

        LOGGER.info(f"\t+ Verifying {check} at level {n}")

        if check == "identity":
            self.report = verify_state_density_identity(structure, n, words, **sweep)
        elif check == "nd-identity":
            self.report = verify_nd_identity(structure, n, words, **sweep)
        elif check == "norm-bound":
            self.report = verify_norm_bound(structure, n, words, **sweep)
        elif check == "word-invariance":
            self.report = verify_word_invariance(structure, n, words, **sweep)
        elif check == "projection":
            self.report = verify_projection_bound(structure, n, self.config.k0, words, **sweep)
        elif check == "overlap":
            selected, info = select_words(structure, n, words, context.caps)
            self.report = spectrum_overlap(structure, n, selected, words_info=info, **sweep)
        elif check == "trace":
            self.report = verify_trace_identity(structure, n, resolve_word(words.word), **shared)
        elif check == "replication":
            self.report = verify_nd_replication(structure, n, **shared)
        elif check == "interlacing":
            self.report = interlacing_check(structure, n, **shared)
        elif check == "deficiency":
            self.report = verify_deficiency(structure, n, **shared)

        self.report.caps = asdict(context.caps)
        self.report.log()

    def get_report(self) -> ConvergenceReport:
        return self.report
