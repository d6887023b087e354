import math
import os
from dataclasses import asdict, dataclass, is_dataclass
from json import dump, load
from logging import getLogger
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
from flatten_dict import flatten

try:
    from typing import Self
except ImportError:
    from typing_extensions import Self

LOGGER = getLogger("artifact")


class classproperty:
    def __init__(self, fget):
        self.fget = fget

    def __get__(self, obj, owner):
        return self.fget(owner)


def to_serializable(value: Any) -> Any:
    """Converts numpy scalars/arrays, tuples and nested dataclasses into plain JSON types."""
    if is_dataclass(value) and not isinstance(value, type):
        return to_serializable(asdict(value))
    if isinstance(value, dict):
        return {str(k): to_serializable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_serializable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_serializable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        # json has no nan/inf
        return value if math.isfinite(value) else None
    return value


@dataclass
class ArtifactMixin:
    """
    A Mixin to save and load reports as JSON artifacts
    """

    # DICTIONARY/JSON API
    def to_dict(self, flat=False) -> Dict[str, Any]:
        data = to_serializable(asdict(self))

        if flat:
            data = flatten(data, reducer="dot")

        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> Self:
        return cls(**data)

    def save_json(self, path: str, flat: bool = False) -> None:
        LOGGER.info(f"\t+ Saving {type(self).__name__} to {path}")
        with open(path, "w") as f:
            dump(self.to_dict(flat=flat), f, indent=4, sort_keys=True)
            f.write("\n")

    @classmethod
    def from_json(cls, path: str) -> Self:
        with open(path, "r") as f:
            data = load(f)
        return cls.from_dict(data)

    @classproperty
    def default_filename(cls) -> str:
        return "report.json"


def save_table(rows: List[Dict[str, Any]], columns: List[str], path: str) -> None:
    LOGGER.info(f"\t+ Saving {len(rows)} rows to {path}")
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False, float_format="%.15g", lineterminator="\n")


def save_gnuplot_script(csv_path: str, x: int, y: int, by: Optional[str] = None) -> str:
    """Writes `<csv stem>.gp`, an impulse plot of columns x:y of the CSV, one series per value of `by`."""
    script_path = os.path.splitext(csv_path)[0] + ".gp"
    csv_name = os.path.basename(csv_path)

    lines = [
        'set datafile separator ","',
        "set key autotitle columnhead",
        'set xlabel "lambda"',
        'set ylabel "weight"',
    ]
    if by is None:
        lines.append(f'plot "{csv_name}" using {x}:{y} with impulses')
    else:
        values = sorted(pd.read_csv(csv_path)[by].unique().tolist())
        lines.append(f'levels = "{" ".join(str(value) for value in values)}"')
        lines.append(
            f'plot for [v in levels] "{csv_name}" using {x}:(column("{by}") == v + 0 ? column({y}) : 1/0) '
            f'with impulses title "{by} ".v'
        )

    LOGGER.info(f"\t+ Saving gnuplot script to {script_path}")
    with open(script_path, "w") as f:
        f.write("\n".join(lines) + "\n")

    return script_path
