"""Synchronous Hopfield dynamics, Hebbian learning, and the asymmetric
triangular-lattice network whose time evolution splits into three cubic
sublattices.

States are +-1 vectors.  The probabilistic update is the product of
per-neuron logistic factors

    P(x'|x) = prod_i  1 / (1 + exp(-beta * x'_i * (sum_j W_ij x_j - t_i)))

which normalizes over x' for any weights, symmetric or not.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class HopfieldNet:
    """Weights W (row i = inputs to neuron i), thresholds, inverse gain."""

    weights: np.ndarray
    thresholds: np.ndarray
    beta: float = 1.0

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        n = self.weights.shape[0]
        if self.weights.shape != (n, n):
            raise ValueError("weight matrix must be square")
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        if self.thresholds.shape != (n,):
            raise ValueError("threshold vector has wrong length")

    @property
    def size(self) -> int:
        return self.weights.shape[0]


def make_net(weights, thresholds=None, beta: float = 1.0) -> HopfieldNet:
    w = np.asarray(weights, dtype=float)
    t = np.zeros(w.shape[0]) if thresholds is None else thresholds
    return HopfieldNet(w, t, beta)


def hebbian_weights(patterns, zero_diagonal: bool = False) -> np.ndarray:
    """W_ij = (1/n) sum_k eps_i^k eps_j^k over the stored patterns.

    The diagonal is kept by default; pass zero_diagonal=True for the
    classical no-self-coupling convention.
    """
    pats = np.asarray(patterns, dtype=float)
    if pats.ndim != 2 or pats.shape[0] == 0:
        raise ValueError("need at least one pattern")
    w = pats.T @ pats / pats.shape[0]
    if zero_diagonal:
        np.fill_diagonal(w, 0.0)
    return w


def local_fields(net: HopfieldNet, x) -> np.ndarray:
    return net.weights @ np.asarray(x, dtype=float)


def deterministic_step(net: HopfieldNet, x) -> np.ndarray:
    """Synchronous threshold update; a neuron exactly at threshold keeps its state."""
    x = np.asarray(x)
    f = local_fields(net, x)
    return np.where(f > net.thresholds, 1, np.where(f < net.thresholds, -1, x)).astype(np.int8)


def deterministic_site_update(net: HopfieldNet, x, i: int) -> np.ndarray:
    """Single-site (asynchronous) version of the threshold update."""
    x = np.asarray(x).copy()
    f = float(net.weights[i] @ x)
    t = net.thresholds[i]
    if f > t:
        x[i] = 1
    elif f < t:
        x[i] = -1
    return x


def _log_sigmoid(a):
    # log(1/(1+e^{-a})), stable for large |a|
    return -np.logaddexp(0.0, -a)


def log_transition_probability(net: HopfieldNet, x, x_next) -> float:
    a = net.beta * np.asarray(x_next, dtype=float) * (local_fields(net, x) - net.thresholds)
    return float(np.sum(_log_sigmoid(a)))


def transition_probability(net: HopfieldNet, x, x_next) -> float:
    return float(np.exp(log_transition_probability(net, x, x_next)))


def transition_matrix_row(net: HopfieldNet, x) -> np.ndarray:
    """Exact distribution over all 2^N successor states of x (N <= 20)."""
    n = net.size
    if n > 20:
        raise ValueError("exhaustive successor enumeration capped at N=20")
    h = local_fields(net, x) - net.thresholds
    states = all_states(n)
    a = net.beta * states * h
    return np.exp(np.sum(_log_sigmoid(a), axis=1))


def all_states(n: int) -> np.ndarray:
    """All +-1 states of n spins; row index is the packed bit pattern with
    spin +1 <-> bit 0 and neuron 0 in the most significant bit."""
    idx = np.arange(2**n, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    return (1 - 2 * bits).astype(np.int8)


def state_index(x) -> int:
    """Packed bit pattern of a +-1 state (inverse of all_states row order)."""
    x = np.asarray(x)
    bits = (1 - x) // 2
    return int("".join(str(int(b)) for b in bits), 2) if len(bits) else 0


def stochastic_step(net: HopfieldNet, x, rng: np.random.Generator) -> np.ndarray:
    """Sample a synchronous update; draws consume the stream in neuron order."""
    h = local_fields(net, x) - net.thresholds
    p_plus = 0.5 * (1.0 + np.tanh(0.5 * net.beta * h))
    u = rng.random(net.size)
    return np.where(u < p_plus, 1, -1).astype(np.int8)


def sample_trajectory(net: HopfieldNet, x0, steps: int, rng) -> np.ndarray:
    """(steps+1, N) array of states; rng is a Generator or a seed."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    layers = [np.asarray(x0, dtype=np.int8)]
    for _ in range(steps):
        layers.append(stochastic_step(net, layers[-1], rng))
    return np.array(layers)


def log_trajectory_probability(net: HopfieldNet, layers) -> float:
    """Log probability of the path conditioned on its first layer."""
    layers = np.asarray(layers)
    if layers.shape[0] < 2:
        raise ValueError("a trajectory needs at least one step")
    return sum(
        log_transition_probability(net, layers[k], layers[k + 1])
        for k in range(layers.shape[0] - 1)
    )


def trajectory_probability(net: HopfieldNet, layers) -> float:
    return float(np.exp(log_trajectory_probability(net, layers)))


def energy(net: HopfieldNet, x) -> float:
    """E = -1/2 sum_ij W_ij x_i x_j - sum_i t_i x_i."""
    x = np.asarray(x, dtype=float)
    return float(-0.5 * x @ net.weights @ x - net.thresholds @ x)


# --- triangular lattice -----------------------------------------------------

@dataclass(frozen=True)
class TriangularNet:
    """L x L rhombic torus, sites (x, y), colored by (x + y) mod 3.

    A site's inputs come from the three neighbors of the previous color:
    (x-1, y), (x, y-1) and (x+1, y+1).  The resulting weight matrix is
    maximally asymmetric: W_ij * W_ji = 0 off the diagonal.
    """

    side: int
    beta: float = 1.0
    weight: float = 1.0

    def __post_init__(self):
        if self.side % 3 != 0 or self.side < 3:
            raise ValueError("side must be a multiple of 3, at least 3")

    @property
    def size(self) -> int:
        return self.side * self.side

    def site_index(self, x: int, y: int) -> int:
        L = self.side
        return (x % L) + L * (y % L)

    def color(self, x: int, y: int) -> int:
        return (x + y) % 3

    def in_neighbors(self, x: int, y: int) -> list[tuple[int, int]]:
        L = self.side
        return [((x - 1) % L, y % L), (x % L, (y - 1) % L), ((x + 1) % L, (y + 1) % L)]

    def to_hopfield(self) -> HopfieldNet:
        n = self.size
        w = np.zeros((n, n))
        for y in range(self.side):
            for x in range(self.side):
                i = self.site_index(x, y)
                for nx, ny in self.in_neighbors(x, y):
                    w[i, self.site_index(nx, ny)] = self.weight
        return HopfieldNet(w, np.zeros(n), self.beta)


def build_triangular_net(side: int, beta: float, weight: float = 1.0) -> HopfieldNet:
    return TriangularNet(side, beta, weight).to_hopfield()


@dataclass
class SublatticeChain:
    """One of the three independent cubic sublattices of a triangular trajectory."""

    residue: int
    members: list[tuple[int, int, int]] = field(default_factory=list)  # (x, y, time)
    log_probability: float = 0.0


def site_time_class(tri: TriangularNet, x: int, y: int, time: int) -> int:
    return (tri.color(x, y) - time) % 3


def cubic_to_site(tri: TriangularNet, i: int, j: int, k: int) -> tuple[int, int, int]:
    """Project cubic coordinates to (site_x, site_y, time) with time = i+j+k."""
    L = tri.side
    return ((i - k) % L, (j - k) % L, i + j + k)


def decompose_sublattices(tri: TriangularNet, layers) -> list[SublatticeChain]:
    """Split the (site, time) pairs of a trajectory by (color - time) mod 3 and
    attribute each per-neuron transition factor to its class.

    The sum of the three class log probabilities reproduces the full
    trajectory log probability exactly, because a site updated at time t+1
    reads only inputs in its own class at time t.
    """
    layers = np.asarray(layers)
    net = tri.to_hopfield()
    chains = [SublatticeChain(r) for r in range(3)]
    for t in range(layers.shape[0]):
        for y in range(tri.side):
            for x in range(tri.side):
                chains[site_time_class(tri, x, y, t)].members.append((x, y, t))
    for t in range(layers.shape[0] - 1):
        h = local_fields(net, layers[t])
        a = net.beta * layers[t + 1].astype(float) * h
        logs = _log_sigmoid(a)
        for y in range(tri.side):
            for x in range(tri.side):
                r = site_time_class(tri, x, y, t + 1)
                chains[r].log_probability += float(logs[tri.site_index(x, y)])
    return chains


# --- JSON interchange --------------------------------------------------------

def state_to_json(x) -> list[int]:
    return [int(v) for v in np.asarray(x)]

def state_from_json(data) -> np.ndarray:
    x = np.asarray(data, dtype=np.int8)
    if not np.all(np.abs(x) == 1):
        raise ValueError("states are +-1 arrays")
    return x

def trajectory_to_json(layers) -> list[list[int]]:
    return [state_to_json(layer) for layer in np.asarray(layers)]

def trajectory_from_json(data) -> np.ndarray:
    return np.array([state_from_json(layer) for layer in data])
