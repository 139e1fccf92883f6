"""Destabilizing nonlinearities and periodic cycles for discrete-time
Lurye feedback loops.

The toolkit answers one question about a stable discrete-time plant in
negative feedback with a monotone (optionally odd, optionally
slope-restricted) nonlinearity: at which rational frequencies can the
loop sustain a nontrivial periodic cycle, and what is an explicit
nonlinearity that produces it?

Typical flow:

    >>> from luryecycle import TransferFunction, RationalFrequency
    >>> from luryecycle import grid_search, build_certificate
    >>> g = TransferFunction((1.0, 0.0), (1.0, -1.8, 0.81))
    >>> best = grid_search(g, 20)[0]
    >>> cert = build_certificate(g, best.freq, slope=best.kbar * 1.0001)
    >>> cert.verdict.ok()
    True
"""

__version__ = "0.1.0"

from .errors import (
    AlgebraicLoopError,
    DomainError,
    EmptyResultError,
    FileFormatError,
    IllPosedFeedbackError,
    LuryecycleError,
    MultivaluedPhiError,
    NoIntersectionError,
    NotMonotoneError,
    PhaseConditionError,
    PlantValidationError,
    SelfVerifyError,
    SingularMatrixError,
    SlopeViolationError,
    ZeroResponseError,
)
from .lti import (
    PeriodicSignal,
    RationalFrequency,
    StateSpaceRealization,
    TransferFunction,
    circulant,
    dc_gain,
    freq_response,
    impulse_tail_sums,
    periodic_response,
    realize,
)
from .phase import (
    BoundKind,
    PhaseCheck,
    SlopeBound,
    grid_search,
    phase_window_holds,
    phase_check,
    phase_check_value,
    slope_bound,
    slope_bound_value,
    sweep_entries,
)
from .interp import (
    Breakpoint,
    DataPairSet,
    PiecewiseNonlinearity,
    compute_shift,
    evaluate,
    interpolate,
    interval_distance,
    monotone_interpolable,
    loop_transform_data,
    odd_append,
    shift_data,
)
from .sim import (
    CycleVerdict,
    NyquistResult,
    interpolation_residual,
    nyquist_gain,
    periodic_steady_state,
    simulate_closed_loop,
    simulate_linear,
    trajectory_csv,
    verify_cycle,
)
from .construct import (
    AnchorPlant,
    ConstructionCertificate,
    build_certificate,
    plant_dc,
    plant_response,
)
from .fileio import (
    load_phi,
    load_plant,
    load_signals,
    phi_from_dict,
    phi_to_dict,
    plant_echo,
    save_phi,
    save_signals,
)

__all__ = [
    "__version__",
    # errors
    "LuryecycleError",
    "PlantValidationError",
    "SingularMatrixError",
    "DomainError",
    "ZeroResponseError",
    "EmptyResultError",
    "NotMonotoneError",
    "NoIntersectionError",
    "SlopeViolationError",
    "MultivaluedPhiError",
    "AlgebraicLoopError",
    "IllPosedFeedbackError",
    "PhaseConditionError",
    "SelfVerifyError",
    "FileFormatError",
    # linear plant machinery
    "TransferFunction",
    "RationalFrequency",
    "PeriodicSignal",
    "StateSpaceRealization",
    "freq_response",
    "dc_gain",
    "realize",
    "impulse_tail_sums",
    "circulant",
    "periodic_response",
    # phase window and slope bounds
    "phase_window_holds",
    "PhaseCheck",
    "phase_check",
    "phase_check_value",
    "BoundKind",
    "SlopeBound",
    "slope_bound",
    "slope_bound_value",
    "sweep_entries",
    "grid_search",
    # interpolation of data pairs
    "DataPairSet",
    "Breakpoint",
    "PiecewiseNonlinearity",
    "monotone_interpolable",
    "interpolate",
    "evaluate",
    "interval_distance",
    "odd_append",
    "shift_data",
    "compute_shift",
    "loop_transform_data",
    # simulation and verification
    "CycleVerdict",
    "NyquistResult",
    "periodic_steady_state",
    "simulate_linear",
    "simulate_closed_loop",
    "interpolation_residual",
    "verify_cycle",
    "nyquist_gain",
    "trajectory_csv",
    # construction
    "AnchorPlant",
    "ConstructionCertificate",
    "plant_response",
    "plant_dc",
    "build_certificate",
    # file formats
    "load_plant",
    "plant_echo",
    "save_phi",
    "load_phi",
    "phi_to_dict",
    "phi_from_dict",
    "save_signals",
    "load_signals",
]
