"""Weyl-Heisenberg signaling and capacity estimates for time-varying channels.

The package is organized around a pipeline:

* :mod:`weylcap.tfcore` - sampled signals, shifts, Fourier transforms,
  ambiguity and Wigner distributions on uniform grids.
* :mod:`weylcap.gabor` - Weyl-Heisenberg (Gabor) systems, frame
  operators, canonical tight windows, analysis and synthesis maps.
* :mod:`weylcap.channel` - exponentially localized spreading
  functions, the Weyl operator they generate, channel matrices,
  twisted convolution and the composed two-sided symbol.
* :mod:`weylcap.capacity` - water-filling, capacity numbers from
  eigenvalues or symbol samples, perturbation and eigenvalue bounds,
  the narrowband limit sweep.
* :mod:`weylcap.validate` - named end-to-end consistency checks.
* :mod:`weylcap.cli` - command line front end over the same routines.
"""

from weylcap.tfcore import (
    TimeGrid,
    SampledSignal,
    TFGridFunction,
    grid_for_scale,
    translate,
    modulate,
    fourier,
    inner,
    norm,
    gaussian_window,
    cross_ambiguity,
    cross_wigner,
    decay_envelope_fit,
)
from weylcap.gabor import (
    GaborSystem,
    Lattice,
    tight_window,
)
from weylcap.channel import (
    ExponentialFactor,
    PhasedExponentialFactor,
    SeparableSpreading,
    PointMassSpreading,
    GridSpreading,
    TwistedPairSpreading,
    exponential_spreading,
    point_mass_spreading,
    twisted_product,
    twisted_convolution,
    apply_weyl,
    channel_matrix,
    spreading_to_symbol,
    symbol_to_spreading,
    gram_symbol,
    shift_pair_inner,
)
from weylcap.capacity import (
    CapacityReport,
    SweepRow,
    capacity_report,
    csir_capacity,
    csir_symbol_capacity,
    csit_capacity,
    error_bound_csir,
    error_bound_csit,
    geometric_sum_check,
    gershgorin_log_gap,
    hermitian_eigenvalues,
    lti_limit_sweep,
    lti_target,
    waterfill,
    waterfill_stability,
)
from weylcap.validate import (
    CheckResult,
    check_names,
    run_checks,
)

__version__ = "0.1.0"
