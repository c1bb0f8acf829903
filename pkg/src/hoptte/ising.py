"""Exact Ising machinery on small cubic lattices: nearest-neighbor
Hamiltonian, brute-force partition function, Gibbs probabilities, an
independent transfer-matrix evaluation of Z, and the anisotropic energy
exponent with in-neighbor face diagonals used by the trajectory
equivalence.

Spin fields are +-1 numpy vectors indexed by vertex; configurations are
also handled as packed integers (bit 0 of the spin at vertex v sits at bit
v, with spin +1 <-> bit 0) so that exhaustive sums run vectorized.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

PERIODIC = "periodic"
OPEN = "open"

EXHAUSTIVE_CAP = 24  # default 2^N enumeration cap


class CubicLattice:
    """Lx x Ly x Lz vertices with per-axis periodic or open boundary."""

    def __init__(self, dims, boundary=(PERIODIC, PERIODIC, PERIODIC)):
        dims = tuple(int(d) for d in dims)
        boundary = tuple(boundary)
        if len(dims) != 3 or len(boundary) != 3:
            raise ValueError("three axes required")
        for L, b in zip(dims, boundary):
            if b not in (PERIODIC, OPEN):
                raise ValueError(f"unknown boundary {b!r}")
            if L < 1 or (b == PERIODIC and L < 3):
                raise ValueError("periodic axes need L >= 3 (multi-edge degeneracy)")
        self.dims = dims
        self.boundary = boundary

    @property
    def n(self) -> int:
        lx, ly, lz = self.dims
        return lx * ly * lz

    def index(self, x: int, y: int, z: int) -> int:
        lx, ly, lz = self.dims
        return (x % lx) + lx * ((y % ly) + ly * (z % lz))

    def coords(self, i: int) -> tuple[int, int, int]:
        lx, ly, _ = self.dims
        return i % lx, (i // lx) % ly, i // (lx * ly)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Unordered nearest-neighbor pairs, respecting the boundary."""
        out = set()
        for i in range(self.n):
            x, y, z = self.coords(i)
            for axis, (c, L, b) in enumerate(zip((x, y, z), self.dims, self.boundary)):
                if c + 1 < L or b == PERIODIC:
                    step = [x, y, z]
                    step[axis] = (c + 1) % L
                    j = self.index(*step)
                    out.add((min(i, j), max(i, j)))
        return sorted(out)

    @cached_property
    def faces(self) -> list[tuple[tuple[int, int], ...]]:
        """Each 2-face as its 4 boundary edges (vertex-pair keys)."""
        out = []
        for i in range(self.n):
            x, y, z = self.coords(i)
            for a1 in range(3):
                for a2 in range(a1 + 1, 3):
                    c = [x, y, z]
                    ok = True
                    for a in (a1, a2):
                        if c[a] + 1 >= self.dims[a] and self.boundary[a] == OPEN:
                            ok = False
                    if not ok:
                        continue
                    corner = {}
                    for d1 in (0, 1):
                        for d2 in (0, 1):
                            cc = [x, y, z]
                            cc[a1] += d1
                            cc[a2] += d2
                            corner[(d1, d2)] = self.index(*cc)
                    def key(u, v):
                        return (min(u, v), max(u, v))
                    out.append(
                        (
                            key(corner[0, 0], corner[1, 0]),
                            key(corner[1, 0], corner[1, 1]),
                            key(corner[1, 1], corner[0, 1]),
                            key(corner[0, 1], corner[0, 0]),
                        )
                    )
        return out

    def __repr__(self):
        return f"CubicLattice({self.dims}, {self.boundary})"


def spins_from_config(config: int, n: int) -> np.ndarray:
    bits = (config >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def config_from_spins(spins) -> int:
    spins = np.asarray(spins)
    bits = (1 - spins) // 2
    return int(np.sum(bits.astype(np.int64) << np.arange(len(spins))))


def hamiltonian_nn(lat: CubicLattice, spins) -> float:
    """H = sum over nearest-neighbor pairs of s_u s_v."""
    spins = np.asarray(spins)
    if spins.shape != (lat.n,):
        raise ValueError("spin field does not match the lattice")
    u, v = np.transpose(lat.edges)
    return float(np.sum(spins[u] * spins[v]))


def pair_mismatch_histogram(pairs, n: int, chunk: int = 1 << 20) -> np.ndarray:
    """counts[m] = number of the 2^n configurations whose spins disagree on
    exactly m of the given (u, v) pairs (pairs may repeat).  Bit columns are
    unpacked once per chunk, so the edge loop runs on int8 vectors."""
    if n > 32:
        raise ValueError("histogram enumeration capped at 32 spins")
    pairs = np.asarray(pairs, dtype=np.int64)
    np_pairs = len(pairs)
    counts = np.zeros(np_pairs + 1, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, chunk):
        cfg = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        bits = np.unpackbits(
            cfg.view(np.uint8).reshape(-1, 4), axis=1, bitorder="little"
        )
        m = np.zeros(len(cfg), dtype=np.int16)
        for u, v in pairs:
            m += bits[:, u] ^ bits[:, v]
        counts += np.bincount(m, minlength=np_pairs + 1)
    return counts


def _mismatch_histogram(lat: CubicLattice) -> np.ndarray:
    """counts[m] = number of configurations with exactly m unsatisfied edges."""
    return pair_mismatch_histogram(lat.edges, lat.n)


def partition_function(lat: CubicLattice, t: float, cap: int = EXHAUSTIVE_CAP) -> float:
    """Exact Z(t) = sum over all 2^N spin fields of exp(t H)."""
    if lat.n > cap:
        raise ValueError(f"lattice too large for exhaustive sum ({lat.n} > {cap} spins)")
    ne = len(lat.edges)
    counts = _mismatch_histogram(lat)
    m = np.arange(ne + 1)
    # H = ne - 2m; factor the largest exponent out for large |t|
    expo = t * (ne - 2.0 * m)
    shift = expo.max()
    return float(np.exp(shift) * np.sum(counts * np.exp(expo - shift)))


def gibbs_probability(lat: CubicLattice, t: float, spins, cap: int = EXHAUSTIVE_CAP) -> float:
    return float(np.exp(t * hamiltonian_nn(lat, spins)) / partition_function(lat, t, cap))


def z_transfer(lat: CubicLattice, t: float) -> float:
    """Z(t) by layer-to-layer transfer contraction along the z axis.

    Independent of the exhaustive sum: within-layer energies are tabulated
    per layer state, cross-layer energy comes from the bit overlap of two
    layer states.  Needs Lx*Ly <= 12.
    """
    lx, ly, lz = lat.dims
    ns = lx * ly
    if ns > 12:
        raise ValueError("transfer contraction capped at 12 sites per layer")
    layer = CubicLattice((lx, ly, 1), (lat.boundary[0], lat.boundary[1], OPEN))
    states = 1 << ns
    cfg = np.arange(states, dtype=np.int64)
    e_within = np.zeros(states)
    for u, v in layer.edges:
        e_within += 1.0 - 2.0 * (((cfg >> u) ^ (cfg >> v)) & 1)
    pop = np.zeros(states, dtype=np.int64)
    for b in range(ns):
        pop += (cfg >> b) & 1
    cross = ns - 2.0 * pop[np.bitwise_xor.outer(cfg, cfg)]
    tm = np.exp(t * (e_within[None, :] + cross))  # T[s', s], within-energy on the source
    if lat.boundary[2] == PERIODIC:
        total = np.linalg.matrix_power(tm, lz)
        return float(np.trace(total))
    vec = np.ones(states)
    for _ in range(lz - 1):
        vec = tm @ vec
    return float(np.exp(t * e_within) @ vec)  # last layer owns its within-energy


def edge_spin_field(lat: CubicLattice, spins) -> dict[tuple[int, int], int]:
    """s_e = product of the endpoint spins; the product around every 2-face is +1."""
    spins = np.asarray(spins)
    return {(u, v): int(spins[u] * spins[v]) for u, v in lat.edges}


# --- anisotropic model with in-neighbor diagonals ----------------------------

IN_STENCIL = ((-1, 0), (0, -1), (1, 1))  # site offsets read from the previous layer


def time_lattice(side: int, steps: int) -> CubicLattice:
    """L x L spatial torus stacked over steps+1 open time layers."""
    return CubicLattice((side, side, steps + 1), (PERIODIC, PERIODIC, OPEN))


def _check_time_lattice(lat: CubicLattice) -> None:
    if lat.boundary != (PERIODIC, PERIODIC, OPEN) or lat.dims[0] != lat.dims[1]:
        raise ValueError("need an L x L periodic torus with an open time axis")


def diag_in_neighbors(lat: CubicLattice, x: int, y: int, tau: int) -> list[int]:
    """The three inputs of (x, y, tau): previous-layer sites shifted by the
    in-neighbor stencil (the three cubic coordinate steps seen in the
    layered coordinates)."""
    return [lat.index(x + dx, y + dy, tau - 1) for dx, dy in IN_STENCIL]


def hamiltonian_diag(
    lat: CubicLattice, spins, beta: float, gamma: float, conditioning_layer: int = 0
) -> float:
    """Energy exponent of the conditioned Gibbs distribution:

        sum over vertices above the conditioning layer of
        -beta * s * (n1 + n2 + n3) - gamma * (n1 n2 + n1 n3 + n2 n3)

    where n1, n2, n3 are the three in-neighbor spins of the vertex.
    """
    _check_time_lattice(lat)
    spins = np.asarray(spins)
    if spins.shape != (lat.n,):
        raise ValueError("spin field does not match the lattice")
    L, _, nt = lat.dims
    if not 0 <= conditioning_layer < nt:
        raise ValueError(f"invalid conditioning layer {conditioning_layer}")
    total = 0.0
    for tau in range(conditioning_layer + 1, nt):
        for y in range(L):
            for x in range(L):
                s = spins[lat.index(x, y, tau)]
                n1, n2, n3 = spins[diag_in_neighbors(lat, x, y, tau)]
                total += -beta * s * (n1 + n2 + n3) - gamma * (n1 * n2 + n1 * n3 + n2 * n3)
    return float(total)
