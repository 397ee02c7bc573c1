"""Numerical laboratory for bang-bang decoupling and quantum Zeno subspaces."""

from .decay import (
    DecayReport,
    Ohmic,
    QuadratureConfig,
    Regime,
    Tabulated,
    asymptotic_rate,
    classify_regime,
    decay_report,
    free_rate,
    kappa,
    modified_rate,
    ohmic_tau_star_estimate,
    sideband_rate,
    transition_time,
)
from .engine import (
    KickCycle,
    ZenoStructure,
    bb_evolve,
    cycle_average_hamiltonian,
    cycle_zeno,
    ergodic_average,
    group_average,
    symmetrization_cycle,
    zeno_limit_evolution,
    zeno_structure,
)
from .linalg import SpectralDecomposition, expm_hermitian, frobenius_distance, spectral_decompose
from .models import ModelInstance, bitflip_model, pauli_string, random_model
from .pulses import LimitReport, PulseTrainSpec, continuous_evolve, evolve_schedule, limit_order_compare

__version__ = "0.1.0"
