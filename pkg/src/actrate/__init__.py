"""actrate: rate-cost analysis for remote compression of action-modified sources.

A sensor observes a memoryless state, takes cost-constrained actions that
shape a noisy channel output, and a monitor must reproduce that output from
a compressed description plus side information. This package computes the
resulting rate-cost and rate-distortion-cost tradeoffs exactly on small
finite alphabets, provides closed forms for the canonical binary instance,
and Monte Carlo simulations of the achievability schemes.
"""

from .binary import (
    bstar,
    binary_structured_aux,
    binary_timeshare_aux,
    make_binary_example,
    parametric_min_causal,
    parametric_min_noncausal,
    rate_causal_binary,
    rate_erased_causal,
    rate_erased_noncausal,
    rate_noncausal_binary,
)
from .errors import (
    ActrateError,
    DomainError,
    IntegrityError,
    InvalidDistributionError,
    SearchSpaceError,
    SpecFormatError,
    UsageError,
)
from .kernel import (
    ConditionalKernel,
    DiscreteDistribution,
    JointTable,
    binary_entropy,
    binary_entropy_derivative,
    conditional_entropy,
    conditional_mutual_information,
    entropy,
    mutual_information,
)
from .model import (
    ActionPolicy,
    AuxiliaryChoice,
    ProblemSpec,
    assemble_joint,
    aux_from_json,
    aux_to_json,
    causal_lossy_rate,
    causal_rate,
    expected_cost,
    expected_distortion,
    lossy_bound_si_both,
    lossy_bound_si_decoder,
    lossy_bound_si_decoder_vaware,
    noncausal_rate,
    reduced_cost,
    spec_from_json,
    spec_to_json,
)
from .sim import (
    SimConfig,
    SimulationReport,
    is_jointly_typical,
    run_campaign,
)
from .solver import (
    RateCostPoint,
    RateCurve,
    SolveConfig,
    brute_force_oracle,
    evaluate_lossy_bounds,
    lagrangian_sweep,
    solve_causal,
    solve_lossy_causal,
    solve_noncausal,
    trace_curve,
)

__version__ = "0.1.0"
