__version__ = '0.1.0'

from .errors import *
from .geometry import (Domain, SampleSet, TargetFunction, draw_sample,
    sample_uniform_ball, attach_labels, separation_radii, separation_stats,
    power_average, bulk_subset)
from .kernel import KernelConfig, eval_kernel, gram, lambda_eig, sobolev_weights
from .interpolant import (Interpolant, fit_min_norm, fit_ridge, predict,
    rkhs_quadratic_form, convention_norm)
from .bump import (eta, eta_moments, build_witness, witness_l2_norm_sq,
    witness_convention_norm)
from .risk import (mc_l2_risk, mc_l2_norm_sq, local_residual_mass,
    holder_certificate)
from .experiments import (SweepGrid, load_grid, run_cell, run_sweep,
    sweep_records, inconsistency_summary, spike_regime_summary)
from .records import SweepRecord, emit_csv, emit_json, read_records
