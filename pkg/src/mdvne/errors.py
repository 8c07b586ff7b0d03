"""Exception hierarchy shared by the embedding modules."""


class EmbeddingError(Exception):
    pass


class InsufficientCpu(EmbeddingError):
    def __init__(self, node, demand, residual):
        self.node = node
        self.demand = demand
        self.residual = residual
        super().__init__(f"substrate node {node}: cpu demand {demand} exceeds residual {residual}")


class InsufficientBandwidth(EmbeddingError):
    def __init__(self, link, demand, residual):
        self.link = link
        self.demand = demand
        self.residual = residual
        super().__init__(f"substrate link {link}: bandwidth demand {demand} exceeds residual {residual}")


class UnknownPlan(EmbeddingError):
    pass


class Infeasible(EmbeddingError):
    """No path satisfies the active bandwidth constraint."""


class LinkMapFailure(EmbeddingError):
    def __init__(self, vlink):
        self.vlink = vlink
        super().__init__(f"no feasible substrate path for virtual link {vlink}")


class Rejected(EmbeddingError):
    """The request cannot be embedded."""


class NoFeasibleIndividual(Rejected):
    pass


class NoFeasibleTarget(EmbeddingError):
    pass
