from .analysis import (
    ConvergenceReport,
    LevelRecord,
    Verdict,
    density_of_states,
    dos_convergence,
    interlacing_check,
    nd_deficiency,
    nd_density,
    nd_density_convergence,
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
from .config import CapsConfig, ToleranceConfig, WordsConfig
from .experiment import RunConfig, StructureConfig, launch, run
from .launchers.inline.config import InlineConfig
from .launchers.process.config import ProcessConfig
from .lattice import BlowupWord, LatticeLevel, VertexAddress, build_level, embed_base, embed_level, generate_words
from .operator import LevelOperator, assemble_level, norm_bound, restrict_dirichlet
from .spectra import (
    PointMeasure,
    atom_discrepancy,
    decompose,
    levy_distance,
    nd_subspace,
    spectral_measure_delta,
)
from .structure import SelfSimilarStructure, ValidationReport, builtin_structure, parse_structure, validate_structure
from .tasks.assemble.config import AssembleConfig
from .tasks.build.config import BuildConfig
from .tasks.dos.config import DosConfig
from .tasks.nd.config import NDConfig
from .tasks.spectrum.config import SpectrumConfig
from .tasks.validate.config import ValidateConfig
from .tasks.verify.config import VerifyConfig

__all__ = [
    "AssembleConfig",
    "BlowupWord",
    "BuildConfig",
    "CapsConfig",
    "ConvergenceReport",
    "DosConfig",
    "InlineConfig",
    "LatticeLevel",
    "LevelOperator",
    "LevelRecord",
    "NDConfig",
    "PointMeasure",
    "ProcessConfig",
    "RunConfig",
    "SelfSimilarStructure",
    "SpectrumConfig",
    "StructureConfig",
    "ToleranceConfig",
    "ValidateConfig",
    "ValidationReport",
    "Verdict",
    "VerifyConfig",
    "VertexAddress",
    "WordsConfig",
    "assemble_level",
    "atom_discrepancy",
    "build_level",
    "builtin_structure",
    "decompose",
    "density_of_states",
    "dos_convergence",
    "embed_base",
    "embed_level",
    "generate_words",
    "interlacing_check",
    "launch",
    "levy_distance",
    "nd_deficiency",
    "nd_density",
    "nd_density_convergence",
    "nd_subspace",
    "norm_bound",
    "parse_structure",
    "restrict_dirichlet",
    "run",
    "spectral_measure_delta",
    "spectrum_overlap",
    "validate_structure",
    "verify_deficiency",
    "verify_nd_identity",
    "verify_nd_replication",
    "verify_norm_bound",
    "verify_projection_bound",
    "verify_state_density_identity",
    "verify_trace_identity",
    "verify_word_invariance",
]
