"""
routecog
Deterministic route-choice assignment with general-cost pricing, Logit and
Kirchhoff route distributions, and a driver cognition feature library.
"""

__version__ = "1.0.0"

from .assignment import (
    AssignmentResult, IterationReport, NetworkState, RouteFlows,
    assign_demand, check_convergence, compute_metrics, free_flow_lower_bound,
    run_assignment, update_travel_times,
)
from .choice import (
    ChoiceParams, ChoiceSet, choice_probabilities, kirchhoff_as_logit,
    kirchhoff_probabilities, logit_probabilities, sample_route, utilities,
)
from .cognition import (
    DriverPacket, EnvironmentEvent, EnvironmentState, FeatureKey, FeatureLibrary,
    LibraryEntry, StaticAttributes, TemporaryAttributes, perceive, reason, resense,
)
from .config import SimulationConfig, load_config
from .costs import (
    CostWeights, EdgeState, VolumeDelayParams, congested_travel_time,
    edge_general_cost, link_financial_cost, route_general_cost,
)
from .demand import ODMatrix, fixture_od, parse_od, read_od, write_od
from .errors import RoutecogError, InputError
from .network import (
    Network, Route, fixture_network, load_network, read_network,
    serialize_network, validate_network,
)
from .rng import SeededStream, packet_stream, resense_stream
from .routing import RouteQuery, brute_force_routes, k_shortest_routes
