"""One-dimensional multi-particle pilot-wave dynamics with Gaussian branches."""

from .ensemble import equivariance_report, histogram_rows, sample_configurations
from .grid import GridWavefunction, evolve, grid_step
from .packets import (
    HBAR,
    BranchWave,
    GaussianPacket,
    MeiosisResult,
    PilotWave,
    free_evolve,
    gaussian_overlap,
    measure_meiosis,
    prepare_singlet,
)
from .trajectories import (
    Configuration,
    TrajectoryTable,
    convergence_check,
    guiding_velocity,
    integrate_trajectories,
    transport,
    velocity_field,
)

__all__ = [
    "HBAR",
    "BranchWave",
    "Configuration",
    "GaussianPacket",
    "GridWavefunction",
    "MeiosisResult",
    "PilotWave",
    "TrajectoryTable",
    "convergence_check",
    "equivariance_report",
    "evolve",
    "free_evolve",
    "gaussian_overlap",
    "grid_step",
    "guiding_velocity",
    "histogram_rows",
    "integrate_trajectories",
    "measure_meiosis",
    "prepare_singlet",
    "sample_configurations",
    "transport",
    "velocity_field",
]
