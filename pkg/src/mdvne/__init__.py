"""Multi-domain virtual network embedding: load-balanced hybrid GA and a traditional GA baseline."""
from .errors import (
    EmbeddingError,
    Infeasible,
    InsufficientBandwidth,
    InsufficientCpu,
    LinkMapFailure,
    NoFeasibleIndividual,
    NoFeasibleTarget,
    Rejected,
    UnknownPlan,
)
from .model import (
    EmbeddingPlan,
    SubstrateLink,
    SubstrateNetwork,
    SubstrateNode,
    VirtualNetworkRequest,
    allocate,
    objective_value,
    release,
)

__version__ = "0.1.0"
