"""Cut-cat state syndrome extraction: simulation, decoding, verification."""

from .pauli import (
    CodeFormatError,
    CssCode,
    PauliFrame,
    Syndrome,
    code_syndrome,
    parse_css_code,
    residual_weight_mod_generator,
    serialize_css_code,
    steane_code,
)
from .circuit import (
    FaultLocation,
    GadgetCircuit,
    Gate,
    circuit_depth,
    count_two_qubit_gates,
    enumerate_fault_locations,
)
from .gadgets import (
    GadgetSpec,
    ResourceReport,
    build_cut_cat,
    build_full_cat,
    resource_report,
)
from .sim import (
    CatSyndrome,
    NoiseParams,
    PropagationResult,
    adaptive_propagate,
    propagate,
    sample_faults,
)
from .decoders import (
    CodeLUT,
    CutCatLUT,
    IdentityDecoder,
    LutBuildError,
    LutDecoder,
    RuleDecoderD3D5,
    RuleDecoderD7,
    arc_sets,
    build_code_lut,
    build_cut_cat_lut,
    decode_d3d5,
    decode_d7,
    decode_lut,
    j_list,
    plan_round2_d7,
)
from .verify import (
    VerificationReport,
    eval_upper_bound,
    oracle_residuals,
    verify_gadget,
)
from .experiments import (
    SweepResult,
    TrialStats,
    fit_slope,
    repeat_until_stable,
    run_gadget_mc,
    sweep_gadget_mc,
    wilson_interval,
)
from .block import BlockSimulator, run_block_mc, sweep_block_mc

__version__ = "0.1.0"
