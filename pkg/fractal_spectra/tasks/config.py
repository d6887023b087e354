from abc import ABC
from dataclasses import dataclass
from logging import getLogger
from typing import TypeVar

LOGGER = getLogger("task")


@dataclass
class TaskConfig(ABC):
    name: str
    _target_: str

    def __post_init__(self):
        pass


TaskConfigT = TypeVar("TaskConfigT", bound=TaskConfig)
