"""Non-homogeneous, time-varying SIS dynamics on graphs with adaptive defences."""

from .control import (BoundReport, ContainController, DieOutController, beta_star, contain_step,
                      dieout_step, prop1_bound, prop2_bound, run_controlled)
from .dynamics import (InfectionState, MLEEstimate, ThresholdReport, TimeSeries,
                       TopologySchedule, Verdict, estimate_mle, infection_pressure, integrate,
                       linear_step, master_step, threshold_check)
from .graph import Graph, SpectralResult, largest_eigenvalue, load_edge_list, read_edge_list
from .schedule import (Constant, NodeSchedules, SquareWave, UniformRandomPiecewise,
                       stationary_mean, time_average)
from .simulate import SimConfig, SimResult, compare_with_model

__version__ = "0.1.0"
