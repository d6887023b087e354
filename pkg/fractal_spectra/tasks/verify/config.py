from dataclasses import dataclass, field
from logging import getLogger

from ...config import WordsConfig
from ...errors import UnknownName, UsageError
from ..config import TaskConfig

LOGGER = getLogger("verify")

# checks averaging over blow-up words
SWEEP_CHECKS = ["identity", "nd-identity", "overlap", "norm-bound", "word-invariance", "projection"]
# checks on the reference word (or a single given word for trace)
SINGLE_CHECKS = ["replication", "interlacing", "deficiency", "trace"]
CHECKS = SWEEP_CHECKS + SINGLE_CHECKS


@dataclass
class VerifyConfig(TaskConfig):
    name: str = "verify"
    _target_: str = "fractal_spectra.tasks.verify.task.VerifyTask"

    check: str = "identity"
    # the level n, or the largest level of the deficiency sequence
    level: int = 1
    # coarse level of the projection bound
    k0: int = 1
    words: WordsConfig = field(default_factory=WordsConfig)

    def __post_init__(self):
        super().__post_init__()

        if self.check not in CHECKS:
            raise UnknownName(f"Unknown check {self.check!r}, expected one of {CHECKS}")

        if self.level < 1:
            raise UsageError(f"level must be >= 1, got {self.level}")

        if self.check in SWEEP_CHECKS and self.words.mode is None:
            raise UsageError(f"Check {self.check!r} needs one of `words.word`, `words.enumerate` or `words.samples`")

        if self.check == "trace" and self.words.mode not in [None, "word"]:
            raise UsageError("Check 'trace' accepts a single `words.word` only")

        if self.check == "projection" and not 1 <= self.k0 <= self.level:
            raise UsageError(f"k0 must lie in [1, level], got k0={self.k0} and level={self.level}")
