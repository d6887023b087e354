import os
import platform
import re
import subprocess
from logging import getLogger
from typing import Any, Dict, Optional

import psutil

LOGGER = getLogger("system")

CAP_ENVIRONMENT_VARIABLE = "FRACTAL_SPECTRA_CAP"


## CPU related stuff
def get_cpu() -> Optional[str]:
    if platform.system() == "Windows":
        return platform.processor()

    elif platform.system() == "Darwin":
        command = "sysctl -n machdep.cpu.brand_string"
        return str(subprocess.check_output(command, shell=True).decode().strip())

    elif platform.system() == "Linux":
        with open("/proc/cpuinfo") as f:
            all_info = f.read()
        for line in all_info.split("\n"):
            if "model name" in line:
                return re.sub(".*model name.*:", "", line, 1).strip()
        return "Could not find device name"

    else:
        raise ValueError(f"Unknown system '{platform.system()}'")


def get_cpu_count() -> int:
    return psutil.cpu_count(logical=True) or 1


def get_cpu_ram_mb() -> float:
    return psutil.virtual_memory().total / 1e6


def get_size_cap_override() -> Optional[int]:
    value = os.environ.get(CAP_ENVIRONMENT_VARIABLE, None)
    if value is None or value.strip() == "":
        return None

    try:
        cap = int(value)
    except ValueError:
        raise ValueError(f"{CAP_ENVIRONMENT_VARIABLE} must be a positive integer, got {value!r}")

    if cap <= 0:
        raise ValueError(f"{CAP_ENVIRONMENT_VARIABLE} must be a positive integer, got {value!r}")

    LOGGER.info(f"\t+ Size caps overridden by {CAP_ENVIRONMENT_VARIABLE}={cap}")
    return cap


def get_system_info() -> Dict[str, Any]:
    return {
        "cpu": get_cpu(),
        "cpu_count": get_cpu_count(),
        "cpu_ram_mb": get_cpu_ram_mb(),
        "system": platform.system(),
        "machine": platform.machine(),
        "platform": platform.platform(),
        "processor": platform.processor(),
        "python_version": platform.python_version(),
    }
