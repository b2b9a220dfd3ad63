"""Kernels of Hamming-Mallows models as an EDA for the quadratic assignment problem."""

from .eda import EdaConfig, RunResult, Schedule, run, schedule_target
from .mallows import (
    HammingMallows,
    KernelSet,
    distance_pmf,
    expected_distance,
    kmm_sample,
    mallows_pmf_exhaustive,
    theta_from_expected_distance,
)
from .perm import (
    CountTables,
    build_count_tables,
    hamming_distance,
    identity,
    sample_at_distance,
    uniform_derangement,
)
from .qap import QapInstance, ardp, delta_swap, evaluate, load_qaplib, parse_qaplib, serialize_qaplib

__version__ = "0.1.0"
