from .occupancy import OccupancyMeasure, solve_occupancy, solve_true_model, extract_policy, Infeasible
from .optimistic import ConfidenceRadii, ExtendedOccupancy, solve_optimistic
from .finite_horizon import BernsteinSet, FiniteHorizonOccupancy, NonStationaryPolicy, solve_opt1
