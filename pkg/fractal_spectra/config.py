from dataclasses import dataclass
from logging import getLogger
from typing import Any, Optional, Tuple

from .errors import UsageError
from .system_utils import get_size_cap_override

LOGGER = getLogger("config")

DEFAULT_CLUSTER_FACTOR = 1e-9
DEFAULT_MATCH_FACTOR = 1e-7


@dataclass
class ToleranceConfig:
    # absolute clustering tolerance, defaults to 1e-9 * K
    cluster: Optional[float] = None
    # relative singular value threshold of the Neumann-Dirichlet residual test
    residual: float = 1e-8
    # absolute cross-level matching tolerance, defaults to 1e-7 * K
    match: Optional[float] = None
    # identity verdicts, relative to the total mass
    identity: float = 1e-9
    # word invariance of the sorted spectra, relative
    invariance: float = 1e-10
    # relative tolerance of hypothesis (H)
    hypothesis: float = 1e-12

    def __post_init__(self):
        for name in ["cluster", "residual", "match", "identity", "invariance", "hypothesis"]:
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise UsageError(f"Tolerance `{name}` must be strictly positive, got {value}")

    def cluster_tol(self, norm_bound: float) -> float:
        return self.cluster if self.cluster is not None else DEFAULT_CLUSTER_FACTOR * norm_bound

    def match_tol(self, norm_bound: float) -> float:
        return self.match if self.match is not None else DEFAULT_MATCH_FACTOR * norm_bound


@dataclass
class CapsConfig:
    vertices: int = 20000
    words: int = 100000
    dense: int = 4000

    def __post_init__(self):
        for name in ["vertices", "words", "dense"]:
            if getattr(self, name) <= 0:
                raise UsageError(f"Cap `{name}` must be strictly positive, got {getattr(self, name)}")

    def apply_override(self) -> None:
        """Replaces every cap by the value of FRACTAL_SPECTRA_CAP when it is set."""
        try:
            override = get_size_cap_override()
        except ValueError as error:
            raise UsageError(str(error))

        if override is not None:
            self.vertices = override
            self.words = override
            self.dense = override


@dataclass
class WordsConfig:
    # a single blow-up word, e.g. "1,2,1" or [1, 2, 1]
    word: Optional[Any] = None
    # all N^n words in lexicographic order
    enumerate: bool = False
    # number of iid uniform words
    samples: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        given = int(self.word is not None) + int(bool(self.enumerate)) + int(self.samples is not None)
        if given > 1:
            raise UsageError("Only one of `word`, `enumerate` or `samples` can be specified.")

        if self.samples is not None:
            if self.samples <= 0:
                raise UsageError(f"`samples` must be strictly positive, got {self.samples}")
            if self.seed is None:
                raise UsageError("`seed` is mandatory when `samples` is specified.")

        if self.word is not None:
            self.word = list(parse_letters(self.word))

    @property
    def mode(self) -> Optional[str]:
        if self.word is not None:
            return "word"
        elif self.enumerate:
            return "enumerate"
        elif self.samples is not None:
            return "sample"
        return None


def parse_letters(word: Any) -> Tuple[int, ...]:
    if isinstance(word, int):
        parts = [word]
    elif isinstance(word, str):
        parts = [part.strip() for part in word.replace("(", "").replace(")", "").split(",")]
        parts = [part for part in parts if part != ""]
    else:
        parts = list(word)

    try:
        return tuple(int(part) for part in parts)
    except (TypeError, ValueError):
        raise UsageError(f"Could not parse blow-up word {word!r}, expected comma separated cell indices")
