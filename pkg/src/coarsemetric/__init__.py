"""Metric amplification and separation checks on finite nets of proper metric spaces."""

__version__ = "0.1.0"

from .diagonal import (  # noqa: E402
    CombSpace,
    EscapeCertificate,
    MetricFamily,
    certify,
    classify,
    comb_space,
    endgame_check,
    escape,
    family_modulus,
    modulus,
    nonseparation_witness,
    separation_demand,
    standard_family,
)
from .expand import (  # noqa: E402
    AmplifiedMetric,
    GrowthFunction,
    SpeedFunction,
    amplify,
    chain_infimum,
    integrate,
    magnification_check,
    make_speed_function,
)
from .separation import (  # noqa: E402
    SeparationVerdict,
    higson_separated,
    slowly_oscillating_check,
    smirnov_separated,
)
from .space import (  # noqa: E402
    Band,
    ClosedSetPair,
    DiscreteSpace,
    Exhaustion,
    LimitTags,
    bands,
    build_exhaustion,
    exhaustion_from_levels,
    validate_space,
)
from .urysohn import StepFunction, StepFunctionSpec, plateau, step_function  # noqa: E402
