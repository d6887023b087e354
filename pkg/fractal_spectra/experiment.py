from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Dict, Optional, Type

from hydra.utils import get_class

from .artifact_utils import ArtifactMixin, classproperty
from .config import CapsConfig, ToleranceConfig
from .errors import FractalSpectraError, UsageError
from .import_utils import get_scientific_libs_info
from .launchers.base import Launcher
from .launchers.config import LauncherConfig
from .structure import SelfSimilarStructure, builtin_structure, load_structure
from .system_utils import get_system_info
from .tasks.base import Task, TaskContext
from .tasks.config import TaskConfig

LOGGER = getLogger("experiment")


@dataclass
class StructureConfig:
    # name of a built-in structure (interval, sg3)
    builtin: Optional[str] = None
    # path to a JSON/YAML structure document
    path: Optional[str] = None

    def check(self) -> None:
        if (self.builtin is None) == (self.path is None):
            raise UsageError("Exactly one of `structure.builtin` or `structure.path` must be specified.")

    def load(self) -> SelfSimilarStructure:
        self.check()

        if self.builtin is not None:
            return builtin_structure(self.builtin)

        return load_structure(self.path)


@dataclass
class RunConfig(ArtifactMixin):
    # Run name
    run_name: str

    # TASK CONFIGURATION
    task: Any  # https://github.com/facebookresearch/hydra/issues/1722#issuecomment-883568386
    # LAUNCHER CONFIGURATION
    launcher: Any  # https://github.com/facebookresearch/hydra/issues/1722#issuecomment-883568386

    # STRUCTURE CONFIGURATION
    structure: StructureConfig = field(default_factory=StructureConfig)
    # NUMERICAL CONFIGURATION
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    caps: CapsConfig = field(default_factory=CapsConfig)

    # ENVIRONMENT CONFIGURATION
    environment: Dict = field(default_factory=lambda: {**get_system_info(), **get_scientific_libs_info()})

    def __post_init__(self):
        self.structure.check()
        self.caps.apply_override()

    @classproperty
    def default_filename(cls) -> str:
        return "run_config.json"


def run(run_config: RunConfig) -> ArtifactMixin:
    """
    Runs a task on the configured structure, word sweeps going through the configured launcher
    """

    structure = run_config.structure.load()

    # Allocate requested launcher
    launcher_config: LauncherConfig = run_config.launcher
    launcher_factory: Type[Launcher] = get_class(launcher_config._target_)
    launcher: Launcher = launcher_factory(launcher_config)

    # Allocate requested task
    task_config: TaskConfig = run_config.task
    task_factory: Type[Task] = get_class(task_config._target_)
    task: Task = task_factory(task_config)

    task.run(structure, TaskContext(tolerances=run_config.tolerances, caps=run_config.caps, launcher=launcher))
    for artifact in task.artifacts:
        LOGGER.info(f"\t+ Wrote {artifact}")

    return task.get_report()


def launch(run_config: RunConfig) -> ArtifactMixin:
    try:
        report = run(run_config)
    except FractalSpectraError as error:
        LOGGER.error(f"{type(error).__name__} during {run_config.task.name} run: {error}")
        raise
    except Exception:
        LOGGER.error(f"Error during {run_config.task.name} run", exc_info=True)
        raise

    return report
