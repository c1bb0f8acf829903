"""Face-state spaces, the 4x4 seed matrix, the lifted weight operator on
three face spaces, its Boltzmann and diagonal dressings, sparse operator
algebra on tensor products of face spaces, and the edge-cover realization
of the nearest-neighbor partition function.

Face states
-----------
A 2-face carries the four edge spins (i1, i2, o1, o2) in the role order of
:func:`hoptte.hypercube.edge_roles`.  The state is encoded as an index
0..15 with i1 in the most significant bit position and spin +1 mapped to
bit 0.  The parity of a state is the product of its four spins; states
arising from a vertex-spin field always have parity +1.

The base operator
-----------------
``build_w0`` lifts the seed matrix to the 3-cube: its in slots carry the
states of the incoming faces (0**, *1*, **0), its out slots the outgoing
faces (1**, *0*, **1), and an entry is 1 exactly when the six face states
are jointly induced by a spin field on the 8 cube vertices (equivalently,
shared edges agree and every face parity is +1).  There are 128 such
entries, one per consistent 12-edge assignment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import hypercube
from .ising import PERIODIC, CubicLattice, pair_mismatch_histogram

# --- face states --------------------------------------------------------------

def face_state_index(i1: int, i2: int, o1: int, o2: int) -> int:
    bits = [(1 - s) // 2 for s in (i1, i2, o1, o2)]
    return (bits[0] << 3) | (bits[1] << 2) | (bits[2] << 1) | bits[3]


def face_state_spins(idx: int) -> tuple[int, int, int, int]:
    return tuple(1 - 2 * ((idx >> k) & 1) for k in (3, 2, 1, 0))


def parity(idx: int) -> int:
    return -1 if bin(idx).count("1") % 2 else 1


def diagonal_spin(idx: int) -> int:
    """i1 * o2; on parity +1 states this equals i2 * o1 (both read the spin of
    the face diagonal joining the two mixed corners)."""
    i1, _, _, o2 = face_state_spins(idx)
    return i1 * o2


def a_permutation() -> np.ndarray:
    """The basis change (i1, i2, o1, o2) -> (o2, o1, i2, i1): 4-bit reversal."""
    perm = np.zeros(16, dtype=np.int64)
    for idx in range(16):
        i1, i2, o1, o2 = face_state_spins(idx)
        perm[idx] = face_state_index(o2, o1, i2, i1)
    return perm


def a_operator() -> np.ndarray:
    """The 16x16 permutation matrix of the role swap; an involution."""
    perm = a_permutation()
    mat = np.zeros((16, 16))
    mat[perm, np.arange(16)] = 1.0
    return mat


def r_matrix() -> np.ndarray:
    """4x4 seed matrix, rows/columns indexed by 2-bit spin pairs (+1 <-> bit 0);
    an entry is 1 exactly when the four spins multiply to +1."""
    return np.array(
        [
            [1, 0, 0, 1],
            [0, 1, 1, 0],
            [0, 1, 1, 0],
            [1, 0, 0, 1],
        ],
        dtype=float,
    )


# --- abstract 3-cube geometry ---------------------------------------------------

CUBE = "***"
FACES_IN = ("0**", "*1*", "**0")
FACES_OUT = ("1**", "*0*", "**1")
ALL_FACES = FACES_IN + FACES_OUT
CUBE_EDGES = tuple(hypercube.subfaces(CUBE, 1))


def _edge_endpoints(edge: str) -> tuple[str, str]:
    p = edge.index("*")
    return edge[:p] + "0" + edge[p + 1 :], edge[:p] + "1" + edge[p + 1 :]


@lru_cache(maxsize=None)
def _face_role_edges() -> dict[str, tuple[str, str, str, str]]:
    return {f: hypercube.edge_roles(f) for f in ALL_FACES}


@dataclass(frozen=True)
class SupportEntry:
    """One consistent edge assignment: packed in/out keys, the per-face states,
    and the underlying 12 edge spins."""

    out_key: int
    in_key: int
    face_states: dict[str, int]
    edge_spins: dict[str, int]


@lru_cache(maxsize=None)
def w0_support() -> tuple[SupportEntry, ...]:
    """Enumerate the 2^8 vertex fields of the cube; the induced edge fields
    are exactly the consistent assignments (the map is 2-to-1)."""
    roles = _face_role_edges()
    seen = {}
    for vf in range(256):
        spin = {f"{v:03b}": 1 - 2 * ((vf >> v) & 1) for v in range(8)}
        edge_spins = {}
        for e in CUBE_EDGES:
            a, b = _edge_endpoints(e)
            edge_spins[e] = spin[a] * spin[b]
        states = {
            f: face_state_index(*(edge_spins[e] for e in roles[f])) for f in ALL_FACES
        }
        in_key = (states[FACES_IN[0]] << 8) | (states[FACES_IN[1]] << 4) | states[FACES_IN[2]]
        out_key = (states[FACES_OUT[0]] << 8) | (states[FACES_OUT[1]] << 4) | states[FACES_OUT[2]]
        seen.setdefault((out_key, in_key), SupportEntry(out_key, in_key, states, edge_spins))
    entries = tuple(seen.values())
    assert len(entries) == 128
    return entries


# --- sparse operators -----------------------------------------------------------

ARENA = (1, 2, 3, 4, 5, 6)


class SparseOperator:
    """Dictionary-of-keys linear map on a tensor product of face spaces.

    ``slots`` names the spaces acted on, in tensor-position order; keys pack
    one 4-bit state per position, first position most significant.  Entries
    are kept as parallel (out, in, weight) arrays sorted by key; stored
    weights are nonzero.
    """

    __slots__ = ("slots", "out_idx", "in_idx", "weights")

    def __init__(self, slots, out_idx, in_idx, weights):
        self.slots = tuple(slots)
        out_idx = np.asarray(out_idx, dtype=np.int64)
        in_idx = np.asarray(in_idx, dtype=np.int64)
        weights = np.asarray(weights, dtype=np.float64)
        keep = weights != 0.0
        out_idx, in_idx, weights = out_idx[keep], in_idx[keep], weights[keep]
        order = np.lexsort((in_idx, out_idx))
        self.out_idx = out_idx[order]
        self.in_idx = in_idx[order]
        self.weights = weights[order]

    @classmethod
    def from_entries(cls, slots, entries: dict[tuple[int, int], float]) -> "SparseOperator":
        if not entries:
            return cls(slots, [], [], [])
        keys = np.array(list(entries.keys()), dtype=np.int64)
        return cls(slots, keys[:, 0], keys[:, 1], list(entries.values()))

    @classmethod
    def identity(cls, slots) -> "SparseOperator":
        dim = 16 ** len(tuple(slots))
        idx = np.arange(dim, dtype=np.int64)
        return cls(slots, idx, idx, np.ones(dim))

    @property
    def nnz(self) -> int:
        return len(self.weights)

    def entries(self) -> dict[tuple[int, int], float]:
        return {
            (int(o), int(i)): float(w)
            for o, i, w in zip(self.out_idx, self.in_idx, self.weights)
        }

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.weights))) if self.nnz else 0.0

    def to_triples(self) -> list[tuple[int, int, float]]:
        """JSON-friendly (out_index, in_index, weight) list; with 6 slots the
        indices are 24-bit integers, 4 bits per slot."""
        return [
            (int(o), int(i), float(w))
            for o, i, w in zip(self.out_idx, self.in_idx, self.weights)
        ]

    def _key(self):
        width = 4 * len(self.slots)
        return (self.out_idx << width) | self.in_idx

    def __repr__(self):
        return f"SparseOperator(slots={self.slots}, nnz={self.nnz})"


def _nibbles(idx: np.ndarray, nslots: int) -> list[np.ndarray]:
    return [(idx >> (4 * (nslots - 1 - k))) & 15 for k in range(nslots)]


def conjugate_slots(op: SparseOperator, perm: np.ndarray) -> SparseOperator:
    """Conjugate by the same one-slot basis permutation in every tensor slot.
    For an involutive permutation P this is P^(n) W P^(n), realized as a key
    relabeling out -> P(out), in -> P(in)."""
    n = len(op.slots)
    out = np.zeros_like(op.out_idx)
    inn = np.zeros_like(op.in_idx)
    for k, (no, ni) in enumerate(zip(_nibbles(op.out_idx, n), _nibbles(op.in_idx, n))):
        shift = 4 * (n - 1 - k)
        out |= perm[no] << shift
        inn |= perm[ni] << shift
    return SparseOperator(op.slots, out, inn, op.weights.copy())


def embed(op: SparseOperator, slots: tuple[int, ...], arena=ARENA) -> SparseOperator:
    """Tensor with identity on the remaining arena slots; op's k-th tensor slot
    lands on the k-th named global slot."""
    slots = tuple(slots)
    if len(slots) != len(op.slots):
        raise ValueError("slot triple does not match the operator")
    if len(set(slots)) != len(slots) or not set(slots) <= set(arena):
        raise ValueError(f"slot collision or unknown slot in {slots}")
    n = len(arena)
    pos = {s: arena.index(s) for s in arena}
    rest = [s for s in arena if s not in slots]

    free = np.arange(16 ** len(rest), dtype=np.int64)
    free_part = np.zeros_like(free)
    for j, s in enumerate(rest):
        nib = (free >> (4 * (len(rest) - 1 - j))) & 15
        free_part |= nib << (4 * (n - 1 - pos[s]))

    ent_out = np.zeros_like(op.out_idx)
    ent_in = np.zeros_like(op.in_idx)
    for k, s in enumerate(slots):
        shift = 4 * (n - 1 - pos[s])
        ent_out |= _nibbles(op.out_idx, len(slots))[k] << shift
        ent_in |= _nibbles(op.in_idx, len(slots))[k] << shift

    out = (ent_out[:, None] | free_part[None, :]).ravel()
    inn = (ent_in[:, None] | free_part[None, :]).ravel()
    w = np.broadcast_to(op.weights[:, None], (op.nnz, len(free))).ravel()
    return SparseOperator(arena, out, inn, w)


def permute_slots(op: SparseOperator, mapping: dict[int, int]) -> SparseOperator:
    """Relabel arena slots (e.g. the transposition pair 1<->6, 2<->5); this is
    conjugation by the corresponding permutation operator."""
    n = len(op.slots)
    pos = {s: k for k, s in enumerate(op.slots)}
    out = np.zeros_like(op.out_idx)
    inn = np.zeros_like(op.in_idx)
    for k, s in enumerate(op.slots):
        target = pos[mapping.get(s, s)]
        shift = 4 * (n - 1 - target)
        out |= _nibbles(op.out_idx, n)[k] << shift
        inn |= _nibbles(op.in_idx, n)[k] << shift
    return SparseOperator(op.slots, out, inn, op.weights.copy())


def compose(a: SparseOperator, b: SparseOperator) -> SparseOperator:
    """Sparse product a . b (a applied after b) by a sort-merge join on the
    middle index."""
    if a.slots != b.slots:
        raise ValueError("operators live on different slot arenas")
    if a.nnz == 0 or b.nnz == 0:
        return SparseOperator(a.slots, [], [], [])
    sa = np.argsort(a.in_idx, kind="stable")
    a_in, a_out, a_w = a.in_idx[sa], a.out_idx[sa], a.weights[sa]
    sb = np.argsort(b.out_idx, kind="stable")
    b_out, b_in, b_w = b.out_idx[sb], b.in_idx[sb], b.weights[sb]

    mids = np.intersect1d(a_in, b_out)
    if len(mids) == 0:
        return SparseOperator(a.slots, [], [], [])
    a_lo = np.searchsorted(a_in, mids, side="left")
    a_hi = np.searchsorted(a_in, mids, side="right")
    b_lo = np.searchsorted(b_out, mids, side="left")
    b_hi = np.searchsorted(b_out, mids, side="right")
    na, nb = a_hi - a_lo, b_hi - b_lo
    block = na * nb
    total = int(block.sum())
    starts = np.concatenate(([0], np.cumsum(block)[:-1]))
    grp = np.repeat(np.arange(len(mids)), block)
    local = np.arange(total) - starts[grp]
    ia = a_lo[grp] + local // nb[grp]
    ib = b_lo[grp] + local % nb[grp]

    out, inn = a_out[ia], b_in[ib]
    w = a_w[ia] * b_w[ib]
    width = 4 * len(a.slots)
    key = (out << width) | inn
    uniq, inv = np.unique(key, return_inverse=True)
    w_sum = np.bincount(inv, weights=w)
    return SparseOperator(a.slots, uniq >> width, uniq & ((1 << width) - 1), w_sum)


def compare(a: SparseOperator, b: SparseOperator) -> float:
    """max |a_e - b_e| over the union of the two supports."""
    if a.slots != b.slots:
        raise ValueError("operators live on different slot arenas")
    keys = np.concatenate([a._key(), b._key()])
    w = np.concatenate([a.weights, -b.weights])
    if len(keys) == 0:
        return 0.0
    uniq, inv = np.unique(keys, return_inverse=True)
    diff = np.bincount(inv, weights=w)
    return float(np.max(np.abs(diff)))


# --- dressed cube operators -----------------------------------------------------

@dataclass(frozen=True)
class CubeSpec:
    """One weight-matrix factor: the 3-cube it lives on (a 3-face of the
    4-cube, or the abstract ``***``), the chosen edges whose spins enter the
    Boltzmann exponent, the faces whose diagonal spins enter the gamma
    exponent (repetition = multiplicity), and whether the factor is
    conjugated by the role swap in every slot."""

    cube: str = CUBE
    edge_choice: tuple[str, ...] = ()
    diagonal_faces: tuple[str, ...] = ALL_FACES
    conjugate_a: bool = False

    @property
    def incoming_faces(self) -> tuple[str, str, str]:
        return tuple(self.globalize(f) for f in FACES_IN)

    @property
    def outgoing_faces(self) -> tuple[str, str, str]:
        return tuple(self.globalize(f) for f in FACES_OUT)

    def globalize(self, local: str) -> str:
        """Insert the cube's fixed coordinate back into a local code."""
        if self.cube == CUBE:
            return local
        p = self.cube.index(next(ch for ch in self.cube if ch != "*"))
        return local[:p] + self.cube[p] + local[p:]

    def localize(self, code: str) -> str:
        """Drop the cube's fixed coordinate from a 4-cube subface code."""
        if self.cube == CUBE:
            if len(code) != 3 or not hypercube.contains(CUBE, code):
                raise ValueError(f"{code!r} is not a subface of the cube")
            return code
        if not hypercube.contains(self.cube, code):
            raise ValueError(f"{code!r} is not a subface of cube {self.cube}")
        p = self.cube.index(next(ch for ch in self.cube if ch != "*"))
        return code[:p] + code[p + 1 :]


def build_w0() -> SparseOperator:
    """The undressed 0/1 operator on three face spaces."""
    return SparseOperator.from_entries(
        (1, 2, 3), {(e.out_key, e.in_key): 1.0 for e in w0_support()}
    )


def build_w(spec: CubeSpec, t: float) -> SparseOperator:
    """Dress each consistent assignment with exp(t * sum of chosen edge spins)."""
    local_edges = [spec.localize(e) for e in spec.edge_choice]
    for e in local_edges:
        if e not in CUBE_EDGES:
            raise ValueError(f"{e!r} is not an edge of the cube")
    entries = {}
    for ent in w0_support():
        s = sum(ent.edge_spins[e] for e in local_edges)
        entries[(ent.out_key, ent.in_key)] = float(np.exp(t * s))
    op = SparseOperator.from_entries((1, 2, 3), entries)
    return conjugate_slots(op, a_permutation()) if spec.conjugate_a else op


def build_wh(spec: CubeSpec, t: float, gamma: float) -> SparseOperator:
    """Additionally dress with exp(gamma * sum of chosen face diagonal spins)."""
    for f in spec.diagonal_faces:
        if f not in ALL_FACES:
            raise ValueError(f"{f!r} is not a face of the cube")
    local_edges = [spec.localize(e) for e in spec.edge_choice]
    for e in local_edges:
        if e not in CUBE_EDGES:
            raise ValueError(f"{e!r} is not an edge of the cube")
    entries = {}
    for ent in w0_support():
        s = sum(ent.edge_spins[e] for e in local_edges)
        d = sum(diagonal_spin(ent.face_states[f]) for f in spec.diagonal_faces)
        entries[(ent.out_key, ent.in_key)] = float(np.exp(t * s) * np.exp(gamma * d))
    op = SparseOperator.from_entries((1, 2, 3), entries)
    return conjugate_slots(op, a_permutation()) if spec.conjugate_a else op


# --- lattice realization of Z(t) -------------------------------------------------

@dataclass(frozen=True)
class LocalEdge:
    """A cube edge as (axis, offsets of the two transverse coordinates)."""

    axis: int
    offsets: tuple[int, int]

    @classmethod
    def from_code(cls, code: str) -> "LocalEdge":
        if len(code) != 3 or code.count("*") != 1:
            raise ValueError(f"not a cube edge: {code!r}")
        axis = code.index("*")
        offs = tuple(int(ch) for ch in code.replace("*", ""))
        return cls(axis, offs)

    def global_edge(self, lat: CubicLattice, cell: tuple[int, int, int]) -> tuple[int, int]:
        base = list(cell)
        transverse = [a for a in range(3) if a != self.axis]
        for a, o in zip(transverse, self.offsets):
            base[a] += o
        u = lat.index(*base)
        base[self.axis] += 1
        v = lat.index(*base)
        return (min(u, v), max(u, v))


@lru_cache(maxsize=None)
def localized_column_triples() -> dict[str, tuple[str, str, str]]:
    """The 8 table columns with each cube's fixed coordinate dropped; every
    triple picks exactly one edge per axis."""
    tables = hypercube.DEFAULT_TABLES
    out = {}
    for table in (tables.lte, tables.rte):
        for key, col in table.items():
            spec = CubeSpec(cube=key)
            out[key] = tuple(spec.localize(e) for e in col)
    return out


def _cells(lat: CubicLattice):
    lx, ly, lz = lat.dims
    return [(a, b, c) for c in range(lz) for b in range(ly) for a in range(lx)]


def cover_check(lat: CubicLattice, triple: tuple[str, str, str]) -> tuple[bool, dict]:
    """With the same local edge triple in every lattice cube, check that each
    lattice edge is selected by exactly one of the 4 cubes containing it."""
    if any(b != PERIODIC for b in lat.boundary):
        raise ValueError("edge covers need a fully periodic lattice")
    locals_ = [LocalEdge.from_code(e) for e in triple]
    counts: dict[tuple[int, int], int] = {e: 0 for e in lat.edges}
    for cell in _cells(lat):
        for le in locals_:
            counts[le.global_edge(lat, cell)] += 1
    bad = [(e, c) for e, c in counts.items() if c != 1]
    report = {
        "n_edges": len(counts),
        "n_selected": sum(counts.values()),
        "first_bad": bad[0] if bad else None,
        "n_bad": len(bad),
    }
    return not bad, report


def search_cover(lat: CubicLattice) -> tuple[str, tuple[str, str, str]] | None:
    """Try the 8 localized table columns as constant (period-1) assignments and
    return the first exact cover found."""
    for key, triple in localized_column_triples().items():
        ok, _ = cover_check(lat, triple)
        if ok:
            return key, triple
    return None


def cube_factor_exponent(lat: CubicLattice, triple, spins) -> int:
    """sum over cubes of the chosen-edge spins; equals H(sigma) under a cover."""
    spins = np.asarray(spins)
    locals_ = [LocalEdge.from_code(e) for e in triple]
    total = 0
    for cell in _cells(lat):
        for le in locals_:
            u, v = le.global_edge(lat, cell)
            total += int(spins[u]) * int(spins[v])
    return total


def realized_z_transfer(lat: CubicLattice, t: float, triple) -> float:
    """Z from the cube-grouped factors, contracted layer by layer.

    For a constant triple the x- and y-edge sums of a layer are shift
    invariant, so each cube layer contributes exp(t(Ex + Ey + cross)) with
    the x/y sums attached to the source or target layer according to the
    chosen edge's time offset.
    """
    if any(b != PERIODIC for b in lat.boundary):
        raise ValueError("realization needs a fully periodic lattice")
    lx, ly, lz = lat.dims
    ns = lx * ly
    if ns > 12:
        raise ValueError("transfer contraction capped at 12 sites per layer")
    locals_ = {le.axis: le for le in (LocalEdge.from_code(e) for e in triple)}
    if set(locals_) != {0, 1, 2}:
        raise ValueError("triple must pick one edge per axis")
    layer = CubicLattice((lx, ly, 1), (PERIODIC, PERIODIC, "open"))
    states = 1 << ns
    cfg = np.arange(states, dtype=np.int64)

    def axis_sum(axis):
        e = np.zeros(states)
        for b in range(ly):
            for a in range(lx):
                u = a + lx * b
                v = ((a + 1) % lx + lx * b) if axis == 0 else (a + lx * ((b + 1) % ly))
                e += 1.0 - 2.0 * (((cfg >> u) ^ (cfg >> v)) & 1)
        return e

    ex, ey = axis_sum(0), axis_sum(1)
    pop = np.zeros(states, dtype=np.int64)
    for b in range(ns):
        pop += (cfg >> b) & 1
    cross = ns - 2.0 * pop[np.bitwise_xor.outer(cfg, cfg)]
    # time offset of an x-edge is its z-offset (second transverse coordinate)
    log_t = t * cross
    for e_vec, axis in ((ex, 0), (ey, 1)):
        dz = locals_[axis].offsets[1]
        if dz == 0:
            log_t = log_t + t * e_vec[None, :]  # source layer
        else:
            log_t = log_t + t * e_vec[:, None]  # target layer
    tm = np.exp(log_t)
    return float(np.trace(np.linalg.matrix_power(tm, lz)))


def realize_partition(
    lat: CubicLattice, t: float, triple, method: str = "transfer", cap: int = 27
) -> float:
    """Evaluate sum over sigma of the product of per-cube chosen-edge factors.

    ``transfer`` contracts layer by layer (needs <= 12 sites per layer);
    ``enumerate`` sums over all 2^N fields, grouped per cube.
    """
    ok, report = cover_check(lat, triple)
    if not ok:
        raise ValueError(f"edge triple is not an exact cover: {report}")
    if method == "transfer":
        return realized_z_transfer(lat, t, triple)
    if method != "enumerate":
        raise ValueError(f"unknown method {method!r}")
    if lat.n > cap:
        raise ValueError(f"lattice too large for enumeration ({lat.n} > {cap})")
    locals_ = [LocalEdge.from_code(e) for e in triple]
    pairs = [le.global_edge(lat, cell) for cell in _cells(lat) for le in locals_]
    ne = len(pairs)
    counts = pair_mismatch_histogram(pairs, lat.n)
    m = np.arange(ne + 1)
    expo = t * (ne - 2.0 * m)
    shift = expo.max()
    return float(np.exp(shift) * np.sum(counts * np.exp(expo - shift)))
