import json
import os
import sys
from logging import getLogger

import hydra
from hydra.core.config_store import ConfigStore
from hydra.errors import HydraException
from omegaconf import DictConfig, OmegaConf
from omegaconf.errors import OmegaConfBaseException

from .errors import ComputationError, FractalSpectraError, UsageError
from .experiment import RunConfig, launch
from .launchers.inline.config import InlineConfig
from .launchers.process.config import ProcessConfig
from .tasks.assemble.config import AssembleConfig
from .tasks.build.config import BuildConfig
from .tasks.dos.config import DosConfig
from .tasks.nd.config import NDConfig
from .tasks.spectrum.config import SpectrumConfig
from .tasks.validate.config import ValidateConfig
from .tasks.verify.config import VerifyConfig

LOGGER = getLogger("cli")

EXIT_SUCCESS = 0
EXIT_FAILED = 1

# Register configurations
cs = ConfigStore.instance()
cs.store(name="run", node=RunConfig)
# tasks configurations
cs.store(group="task", name=ValidateConfig.name, node=ValidateConfig)
cs.store(group="task", name=BuildConfig.name, node=BuildConfig)
cs.store(group="task", name=AssembleConfig.name, node=AssembleConfig)
cs.store(group="task", name=SpectrumConfig.name, node=SpectrumConfig)
cs.store(group="task", name=DosConfig.name, node=DosConfig)
cs.store(group="task", name=NDConfig.name, node=NDConfig)
cs.store(group="task", name=VerifyConfig.name, node=VerifyConfig)
# launchers configurations
cs.store(group="launcher", name=InlineConfig.name, node=InlineConfig)
cs.store(group="launcher", name=ProcessConfig.name, node=ProcessConfig)


def exit_with_error(error: Exception, exit_code: int) -> None:
    """Prints the error as one JSON object on stderr and exits with `exit_code`."""
    payload = {"error": type(error).__name__, "message": str(error), "exit_code": exit_code}
    print(json.dumps(payload, sort_keys=True), file=sys.stderr, flush=True)
    sys.exit(exit_code)


# fractal-spectra
@hydra.main(version_base=None)
def fractal_spectra_cli(run_config: DictConfig) -> None:
    os.environ["FRACTAL_SPECTRA_INTERFACE"] = "CLI"

    try:
        # Instantiate the run configuration and trigger its __post_init__
        run_config: RunConfig = OmegaConf.to_object(run_config)
        run_config.save_json(RunConfig.default_filename)

        report = launch(run_config=run_config)
    except FractalSpectraError as error:
        exit_with_error(error, error.exit_code)
    except OmegaConfBaseException as error:
        exit_with_error(error, UsageError.exit_code)
    except Exception as error:
        exit_with_error(error, ComputationError.exit_code)

    report.save_json(report.default_filename)
    print(json.dumps(report.to_dict(), indent=4, sort_keys=True), flush=True)

    sys.exit(EXIT_SUCCESS if report.passed else EXIT_FAILED)


def main() -> None:
    """Console script entry point, maps composition and override errors to the usage exit code."""
    # let hydra raise instead of printing its own message and exiting with 1
    os.environ["HYDRA_FULL_ERROR"] = "1"

    try:
        fractal_spectra_cli()
    except (HydraException, OmegaConfBaseException) as error:
        exit_with_error(error, UsageError.exit_code)
    except Exception as error:
        exit_with_error(error, ComputationError.exit_code)
