"""The emergent 2D lattice, its stabilizers, logicals, and ground space.

Geometry.  Rows j = 0..M alternate site kinds: even rows hold VERTEX_DUAL
sites at even x2 positions, odd rows hold EDGE_GROUP sites at odd x2
(x2 is twice the horizontal position).  Horizontal boundary is periodic
with n sites per row.  Vertical boundary is either periodic (rows taken
mod M, M even, giving a torus) or open (rows 0..M inclusive, a cylinder
whose first row carries the 1D input state).

Plaquettes.  A plaquette is the diamond around a face center (j, c):
west and east corners at (j, c -+ 1), north and south at (j +- 1, c).
Centers with odd j carry group-element labels; centers with even j carry
character labels.  Untwisted, each term is the four-body mix of two
shifts and two clocks; a twist replaces the shift pair by the projective
pair so the per-plaquette map label -> term stays a representation.

Ground-space dimension is computed two independent ways: an exact trace
of the product of plaquette projectors (a histogram of root-of-unity
phases, evaluated with integer cyclotomic arithmetic) and a dense oracle
that projects random vectors and ranks them.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .cyclotomic import phase_counts_as_integer
from .groups import (
    Cocycle,
    DualCharacter,
    GroupElement,
    GroupSpec,
    is_subgroup,
    restricted_characters,
)
from .operators import (
    MonomialOperator,
    ProductOperator,
    SiteKind,
    StateVector,
    clock_z,
    clock_z_dual,
    commutation_phase,
    projective_x,
    projective_x_dual,
    projective_x_tilde,
    projective_x_tilde_dual,
    shift_x,
    shift_x_dual,
)


class GeometryError(ValueError):
    """Inconsistent or unsupported lattice geometry."""


class CapExceededError(RuntimeError):
    pass


@dataclass(frozen=True)
class Lattice2D:
    group: GroupSpec
    n: int
    m: int
    vertical: str = "periodic"

    def __post_init__(self) -> None:
        if self.n < 2 or self.m < 2:
            raise GeometryError("need n >= 2 and m >= 2")
        if self.vertical not in ("periodic", "open"):
            raise GeometryError("vertical boundary must be 'periodic' or 'open'")
        if self.vertical == "periodic" and self.m % 2 != 0:
            raise GeometryError("a torus needs an even number of rows")

    @property
    def rows(self) -> range:
        return range(self.m) if self.vertical == "periodic" else range(self.m + 1)

    def row_positions(self, j: int) -> list[int]:
        return [(j % 2) + 2 * k for k in range(self.n)]

    def site_kind(self, j: int) -> SiteKind:
        return SiteKind.VERTEX_DUAL if j % 2 == 0 else SiteKind.EDGE_GROUP

    def sites(self) -> list[tuple]:
        out = []
        for j in self.rows:
            kind = self.site_kind(j)
            for x2 in self.row_positions(j):
                out.append(((j, x2), kind))
        return out

    def wrap(self, j: int, x2: int) -> tuple[int, int]:
        if self.vertical == "periodic":
            j %= self.m
        return (j, x2 % (2 * self.n))

    def has_row(self, j: int) -> bool:
        if self.vertical == "periodic":
            return True
        return 0 <= j <= self.m

    def plaquette_centers(self) -> list[tuple[int, int]]:
        """Face centers (j, c); the label family follows the parity of j."""
        centers = []
        for j in self.rows:
            if self.vertical == "open" and not (self.has_row(j - 1) and self.has_row(j + 1)):
                continue
            c_parity = (j + 1) % 2
            for x2 in [(c_parity + 2 * k) for k in range(self.n)]:
                centers.append((j, x2))
        return centers

    @property
    def total_dim(self) -> int:
        return self.group.size ** len(self.sites())


@dataclass(frozen=True)
class StabilizerLabel:
    center: tuple[int, int]
    family: str  # "group" for element labels, "dual" for character labels
    exps: tuple[int, ...]

    def as_json(self) -> dict:
        return {"center": list(self.center), "family": self.family, "element": list(self.exps)}


@dataclass(frozen=True)
class StabilizerTerm:
    label: StabilizerLabel
    op: ProductOperator


@dataclass(frozen=True)
class CodeSpec:
    lattice: Lattice2D
    twist_even: Cocycle | None = None
    twist_odd: Cocycle | None = None
    boundary_beta: Cocycle | None = None
    subgroup_bottom: tuple | None = None
    subgroup_top: tuple | None = None
    orientation: str = "standard"

    def __post_init__(self) -> None:
        g = self.lattice.group
        for tw in (self.twist_even, self.twist_odd, self.boundary_beta):
            if tw is not None and tw.group != g:
                raise GeometryError("twist cocycle defined on a different group")
        if self.orientation not in ("standard", "reflected"):
            raise GeometryError("orientation must be 'standard' or 'reflected'")
        for sub in (self.subgroup_bottom, self.subgroup_top):
            if sub is not None and not is_subgroup(g, sub):
                raise GeometryError("boundary phase input is not a closed subgroup")

    @property
    def group(self) -> GroupSpec:
        return self.lattice.group


def _plaquette_corners(spec: CodeSpec, center: tuple[int, int], label) -> dict:
    """Corner operators of the plaquette at `center` for one label.

    Standard orientation: projective-conjugate shift west, projective
    shift east, adjoint clock north, clock south.  Reflected swaps both
    pairs; the two conventions generate the same stabilizer group.  On a
    two-row torus north and south wrap onto the same site and their
    clocks multiply away.
    """
    lat = spec.lattice
    j, c = center
    group_family = j % 2 == 1
    twist = spec.twist_even if group_family else spec.twist_odd
    alpha = twist if twist is not None else Cocycle.trivial(spec.group)
    if group_family:
        west = projective_x_tilde(alpha, label)
        east = projective_x(alpha, label)
        clock = clock_z_dual(label)
    else:
        west = projective_x_tilde_dual(alpha, label)
        east = projective_x_dual(alpha, label)
        clock = clock_z(label)
    north, south = clock.adjoint(), clock
    if spec.orientation == "reflected":
        west, east = east, west
        north, south = south, north
    corners = {}
    for site, op in [
        (lat.wrap(j, c - 1), west),
        (lat.wrap(j, c + 1), east),
        (lat.wrap(j + 1, c), north),
        (lat.wrap(j - 1, c), south),
    ]:
        corners[site] = op.multiply(corners[site]) if site in corners else op
    return corners


def _term(spec: CodeSpec, center, family: str, label) -> StabilizerTerm:
    lat = spec.lattice
    factors = _plaquette_corners(spec, center, label)
    kinds = {site: lat.site_kind(site[0]) for site in factors}
    op = ProductOperator.from_dict(factors, kinds, spec.group.phase_modulus)
    return StabilizerTerm(StabilizerLabel(center, family, label.exps), op)


def build_bulk_stabilizers(spec: CodeSpec) -> list[StabilizerTerm]:
    """One term per (plaquette, label), identity labels included."""
    terms = []
    for center in spec.lattice.plaquette_centers():
        if center[0] % 2 == 1:
            for g in spec.group.elements():
                terms.append(_term(spec, center, "group", g))
        else:
            for chi in spec.group.characters():
                terms.append(_term(spec, center, "dual", chi))
    return terms


def build_boundary_terms(spec: CodeSpec, which: str) -> list[StabilizerTerm]:
    """Three-body boundary stabilizers on an open vertical edge.

    The terms are the boundary-truncated character plaquettes, with the
    shift pair twisted by boundary_beta.  When a boundary subgroup H is
    given the labels are restricted to the characters trivial on H; an
    absent subgroup emits all labels (the caller may filter afterwards).
    """
    lat = spec.lattice
    if lat.vertical != "open":
        raise GeometryError("boundary terms only exist with open vertical boundary")
    if which not in ("bottom", "top"):
        raise GeometryError("which must be 'bottom' or 'top'")
    beta = spec.boundary_beta if spec.boundary_beta is not None else Cocycle.trivial(spec.group)
    row = 0 if which == "bottom" else lat.m
    if row % 2 != 0:
        raise GeometryError("boundary rows of odd parity are not supported here")
    inner = 1 if which == "bottom" else lat.m - 1
    subgroup = spec.subgroup_bottom if which == "bottom" else spec.subgroup_top
    if subgroup is None:
        labels = list(spec.group.characters())
    else:
        labels = list(restricted_characters(spec.group, subgroup))
    terms = []
    for k in range(lat.n):
        c = 2 * k + 1
        for chi in labels:
            west = projective_x_tilde_dual(beta, chi)
            east = projective_x_dual(beta, chi)
            clock = clock_z(chi).adjoint() if which == "bottom" else clock_z(chi)
            factors = {
                lat.wrap(row, c - 1): west,
                lat.wrap(row, c + 1): east,
                (inner, c): clock,
            }
            kinds = {site: lat.site_kind(site[0]) for site in factors}
            op = ProductOperator.from_dict(factors, kinds, spec.group.phase_modulus)
            terms.append(StabilizerTerm(StabilizerLabel((row, c), f"boundary_{which}", chi.exps), op))
    return terms


def check_all_commute(terms) -> dict:
    """Exact pairwise commutation report; only overlapping pairs are tested."""
    by_site: dict = {}
    for idx, term in enumerate(terms):
        for site in term.op.support:
            by_site.setdefault(site, []).append(idx)
    candidates = set()
    for idxs in by_site.values():
        for a, b in itertools.combinations(sorted(idxs), 2):
            candidates.add((a, b))
    violations = []
    for a, b in sorted(candidates):
        phase = commutation_phase(terms[a].op, terms[b].op)
        if phase is None or not phase.is_one:
            violations.append(
                {
                    "a": terms[a].label.as_json(),
                    "b": terms[b].label.as_json(),
                    "phase": None if phase is None else phase.k,
                }
            )
    return {
        "name": "all_commute",
        "passed": not violations,
        "pairs_checked": len(candidates),
        "violations": violations,
    }


# -- ground space dimension ---------------------------------------------------


def _plaquette_term_table(spec: CodeSpec):
    """Per plaquette, the list of corner ops for every label, plus geometry."""
    lat = spec.lattice
    centers = lat.plaquette_centers()
    per_plaquette = []
    for center in centers:
        group_family = center[0] % 2 == 1
        labels = list(spec.group.elements()) if group_family else list(spec.group.characters())
        ops = [_plaquette_corners(spec, center, lab) for lab in labels]
        per_plaquette.append((center, ops))
    return centers, per_plaquette


def ground_space_dimension(spec: CodeSpec, cap_bits: float = 20.0) -> int:
    """Exact dimension of the joint +1 eigenspace on the torus.

    Expands tr prod_p Pi_p over all label assignments.  Each assignment
    contributes a product of single-site traces, each of which is either
    zero or |G| times a root of unity for these plaquette algebras; the
    assignment histogram over phases is converted to an exact integer
    with cyclotomic arithmetic.
    """
    lat = spec.lattice
    if lat.vertical != "periodic":
        raise GeometryError("the trace formula is implemented for the torus")
    size = spec.group.size
    centers, per_plaquette = _plaquette_term_table(spec)
    num_p = len(centers)
    if num_p * math.log2(size) > cap_bits:
        raise CapExceededError(
            f"{num_p} plaquettes over Z_{size} exceeds the {cap_bits}-bit assignment cap"
        )
    L = spec.group.phase_modulus
    sites = [s for s, _ in lat.sites()]
    site_index = {s: i for i, s in enumerate(sites)}
    # Which plaquettes touch each site, in global plaquette order.
    touching: list[list[int]] = [[] for _ in sites]
    for p, (center, _) in enumerate(per_plaquette):
        for site in _plaquette_corners(spec, center, _first_label(spec, center)):
            touching[site_index[site]].append(p)
    ident = MonomialOperator.identity(size, L)
    # Local trace tables: per site, over joint labels of its plaquettes.
    dead_tables = []
    phase_tables = []
    for s_idx, site in enumerate(sites):
        plqs = touching[s_idx]
        shape = (size,) * len(plqs)
        dead = np.zeros(shape, dtype=bool)
        phases = np.zeros(shape, dtype=np.int64)
        for local in itertools.product(range(size), repeat=len(plqs)):
            op = ident
            for p, lab_idx in zip(plqs, local):
                corner = per_plaquette[p][1][lab_idx].get(site)
                op = corner.multiply(op)
            counts = op.trace_counts()
            nz = np.nonzero(counts)[0]
            if len(nz) == 0:
                dead[local] = True
            elif len(nz) == 1 and counts[nz[0]] == size:
                phases[local] = nz[0]
            elif phase_counts_as_integer(counts) == 0:
                # Full character sums vanish exactly.
                dead[local] = True
            else:
                raise ArithmeticError("site trace is not 0 or |G| times a phase")
        dead_tables.append(dead)
        phase_tables.append(phases)
    # Enumerate assignments, vectorized over a flat index.
    total = size**num_p
    idx = np.arange(total, dtype=np.int64)
    digits = []
    for p in range(num_p):
        digits.append((idx // (size ** (num_p - 1 - p))) % size)
    alive = np.ones(total, dtype=bool)
    phase_sum = np.zeros(total, dtype=np.int64)
    for s_idx in range(len(sites)):
        plqs = touching[s_idx]
        local_flat = np.zeros(total, dtype=np.int64)
        for p in plqs:
            local_flat = local_flat * size + digits[p]
        dead = dead_tables[s_idx].reshape(-1)[local_flat]
        alive &= ~dead
        phase_sum = (phase_sum + phase_tables[s_idx].reshape(-1)[local_flat]) % L
    counts = np.bincount(phase_sum[alive], minlength=L).astype(np.int64)
    # Each alive assignment contributes |G|**num_sites w**phase; dividing by
    # |G|**num_p with num_sites == num_p leaves the bare phase histogram.
    if len(sites) != num_p:
        raise GeometryError("torus site and plaquette counts must match")
    value = phase_counts_as_integer(counts)
    if value < 0:
        raise ArithmeticError("trace produced a negative dimension")
    return int(value)


def _first_label(spec: CodeSpec, center):
    return (
        next(iter(spec.group.elements()))
        if center[0] % 2 == 1
        else next(iter(spec.group.characters()))
    )


def ground_space_dimension_dense(
    spec: CodeSpec, seed: int = 7, tol: float = 1e-8, dim_cap: int = 2**14
) -> int:
    """Independent oracle: rank of the projected image of random vectors.

    Applies every plaquette projector to a batch of random states and
    counts the numerical rank, growing the batch until it exceeds the
    rank found.  Works for any boundary supported by the term builders.
    """
    lat = spec.lattice
    if lat.total_dim > dim_cap:
        raise CapExceededError("dense oracle dimension cap exceeded")
    terms = build_bulk_stabilizers(spec)
    by_center: dict = {}
    for t in terms:
        by_center.setdefault(t.label.center, []).append(t.op)
    sites = lat.sites()
    dims = tuple(spec.group.size for _ in sites)
    rng = np.random.default_rng(seed)
    batch = 8
    while True:
        vecs = []
        for _ in range(batch):
            raw = rng.normal(size=lat.total_dim) + 1j * rng.normal(size=lat.total_dim)
            st = StateVector(
                tuple(s for s, _ in sites), tuple(k for _, k in sites), dims, raw
            )
            for ops in by_center.values():
                acc = np.zeros_like(st.amps)
                for op in ops:
                    acc += st.apply(op).amps
                st = StateVector(st.site_ids, st.kinds, st.dims, acc / len(ops))
            vecs.append(st.amps)
        mat = np.array(vecs)
        sv = np.linalg.svd(mat, compute_uv=False)
        rank = int(np.sum(sv > tol * max(1.0, sv[0] if len(sv) else 1.0)))
        if rank < batch:
            return rank
        batch *= 2
        if batch > 4 * lat.total_dim:
            raise ArithmeticError("dense oracle failed to converge")


def stabilizer_group_order(terms, limit: int = 200000) -> int:
    """Order of the group generated by the terms (BFS over exact monomials)."""
    frontier = [t.op for t in terms]
    seen = {ProductOperator.identity_op(terms[0].op.modulus)}
    queue = [ProductOperator.identity_op(terms[0].op.modulus)]
    while queue:
        cur = queue.pop()
        for gen in frontier:
            nxt = gen.multiply(cur)
            if nxt not in seen:
                if len(seen) >= limit:
                    raise CapExceededError("stabilizer group enumeration limit hit")
                seen.add(nxt)
                queue.append(nxt)
    return len(seen)


# -- logical operators --------------------------------------------------------


@dataclass(frozen=True)
class LogicalOperator:
    name: str
    op: ProductOperator
    commutes: bool
    witness: dict | None


def logical_operators(spec: CodeSpec) -> list[LogicalOperator]:
    """Representative string logicals on the torus, with commutation proofs.

    Horizontal diagonal strings along one row of each parity and vertical
    shift strings along one column of each parity.  Each candidate is
    checked exactly against every stabilizer; candidates that fail (the
    vertical group-shift strings of a twisted code) are returned flagged
    with the violating term.
    """
    lat = spec.lattice
    if lat.vertical != "periodic":
        raise GeometryError("logical representatives are built on the torus")
    size_modulus = spec.group.phase_modulus
    terms = build_bulk_stabilizers(spec)
    out = []

    def check(name, factors, kinds):
        op = ProductOperator.from_dict(factors, kinds, size_modulus)
        witness = None
        for t in terms:
            ph = commutation_phase(t.op, op)
            if ph is None or not ph.is_one:
                witness = {"term": t.label.as_json(), "phase": None if ph is None else ph.k}
                break
        out.append(LogicalOperator(name, op, witness is None, witness))

    for chi in spec.group.characters():
        if chi.is_identity:
            continue
        row = 1
        factors = {(row, x2): clock_z(chi) for x2 in lat.row_positions(row)}
        kinds = {s: SiteKind.EDGE_GROUP for s in factors}
        check(f"Z_row{row}_chi{chi.exps}", factors, kinds)
        col = 0
        factors = {(j, col): shift_x_dual(chi) for j in lat.rows if j % 2 == 0}
        kinds = {s: SiteKind.VERTEX_DUAL for s in factors}
        check(f"X_col{col}_chi{chi.exps}", factors, kinds)
    for g in spec.group.elements():
        if g.is_identity:
            continue
        row = 0
        factors = {(row, x2): clock_z_dual(g) for x2 in lat.row_positions(row)}
        kinds = {s: SiteKind.VERTEX_DUAL for s in factors}
        check(f"Z_row{row}_g{g.exps}", factors, kinds)
        col = 1
        factors = {(j, col): shift_x(g) for j in lat.rows if j % 2 == 1}
        kinds = {s: SiteKind.EDGE_GROUP for s in factors}
        check(f"X_col{col}_g{g.exps}", factors, kinds)
    return out
