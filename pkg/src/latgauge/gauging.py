"""Layer-by-layer gauging maps and their verification.

A gauging map takes one horizontal row of matter sites, adjoins a new row
of sites carrying the gauge fields, and projects onto the subspace where
the matter symmetry has been made local.  Even-index layers gauge the
group symmetry of a VERTEX_DUAL row (adding an EDGE_GROUP row above);
odd-index layers gauge the dual symmetry of an EDGE_GROUP row (adding a
VERTEX_DUAL row).  Iterating and stacking the rows produces the 2D states
checked by the lattice module.

Site ids are (row, x2) with x2 twice the horizontal position, so vertex
sites sit at even x2 and edge sites at odd x2.  With periodic horizontal
boundary a row has n sites; with open boundary each new row gains one
site and the stack grows into a trapezoid (row j spans x2 = -j .. 2(n0-1)+j).

Each map is normalized so that inputs invariant under the row symmetry
are sent to unit-norm outputs; the projector average itself would shrink
them by a fixed power of |G| which is recorded on the map.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np

from .cyclotomic import PhaseTensor, mono_mul_left, mono_mul_right
from .groups import Cocycle, GroupSpec
from .operators import (
    MonomialOperator,
    ProductOperator,
    SiteKind,
    StateVector,
    clock_z,
    clock_z_dual,
    projective_x,
    projective_x_dual,
    projective_x_tilde,
    projective_x_tilde_dual,
    shift_x,
    shift_x_dual,
)

DEFAULT_DIM_CAP = 2**24


class CapExceededError(RuntimeError):
    """A requested computation would exceed the configured size cap."""


def dimension_cap(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get("GAUGE_MAX_DIM")
    return int(env) if env else DEFAULT_DIM_CAP


@dataclass(frozen=True)
class LayerSpec:
    """One gauging step: matter row `index`, new row `index + 1`.

    matter_rep optionally overrides the diagonal matter representation:
    a mapping from label exponent tuples to diagonal MonomialOperators
    forming a genuine representation.  The default is the clock.
    """

    group: GroupSpec
    index: int
    n: int
    boundary: str = "periodic"
    twist: Cocycle | None = None
    offset: int = 0
    matter_rep: tuple | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("a layer needs at least two matter sites")
        if self.boundary not in ("periodic", "open"):
            raise ValueError("boundary must be 'periodic' or 'open'")
        if self.twist is not None and self.twist.group != self.group:
            raise ValueError("twist cocycle defined on a different group")
        if self.boundary == "periodic" and self.offset != 0:
            raise ValueError("periodic layers have no offset")
        if self.matter_rep is not None:
            object.__setattr__(self, "matter_rep", tuple(sorted(dict(self.matter_rep).items())))
            self._validate_matter_rep()

    def _validate_matter_rep(self) -> None:
        rep = dict(self.matter_rep)
        labels = self.labels()
        if set(rep) != {lab.exps for lab in labels}:
            raise ValueError("matter_rep must cover every symmetry label exactly once")
        for mono in rep.values():
            if mono.perm != tuple(range(mono.dim)) or mono.dim != self.group.size:
                raise ValueError("matter_rep entries must be diagonal monomials of the right dimension")
        for a in labels:
            for b in labels:
                if rep[a.exps].multiply(rep[b.exps]) != rep[(a * b).exps]:
                    raise ValueError("matter_rep is not a representation")

    def matter_clock(self, label) -> MonomialOperator:
        if self.matter_rep is not None:
            return dict(self.matter_rep)[label.exps]
        return clock_z_dual(label) if self.parity == "even" else clock_z(label)

    @property
    def parity(self) -> str:
        return "even" if self.index % 2 == 0 else "odd"

    @property
    def matter_kind(self) -> SiteKind:
        return SiteKind.VERTEX_DUAL if self.parity == "even" else SiteKind.EDGE_GROUP

    @property
    def new_kind(self) -> SiteKind:
        return SiteKind.EDGE_GROUP if self.parity == "even" else SiteKind.VERTEX_DUAL

    def matter_positions(self) -> list[int]:
        # Periodic rows sit at the fixed residue class matching the row
        # parity; open rows shift left by one position per layer.
        base = (self.index % 2) if self.boundary == "periodic" else self.offset
        return [base + 2 * k for k in range(self.n)]

    def new_positions(self) -> list[int]:
        if self.boundary == "periodic":
            base = (self.index + 1) % 2
            return [base + 2 * k for k in range(self.n)]
        return [self.offset - 1 + 2 * k for k in range(self.n + 1)]

    def matter_sites(self) -> list[tuple]:
        return [((self.index, x2), self.matter_kind) for x2 in self.matter_positions()]

    def new_sites(self) -> list[tuple]:
        return [((self.index + 1, x2), self.new_kind) for x2 in self.new_positions()]

    def labels(self):
        """The symmetry labels this layer gauges, as element/character objects."""
        if self.parity == "even":
            return list(self.group.elements())
        return list(self.group.characters())

    def next_layer(self, twist: Cocycle | None = None) -> "LayerSpec":
        n_next = self.n if self.boundary == "periodic" else self.n + 1
        off_next = 0 if self.boundary == "periodic" else self.offset - 1
        return LayerSpec(self.group, self.index + 1, n_next, self.boundary, twist, off_next)


def _corner_ops(layer: LayerSpec, label) -> tuple[MonomialOperator, MonomialOperator, MonomialOperator]:
    """(left new, matter, right new) factors of the local symmetry at one site."""
    alpha = layer.twist if layer.twist is not None else Cocycle.trivial(layer.group)
    if layer.parity == "even":
        return (
            projective_x_tilde(alpha, label),
            layer.matter_clock(label),
            projective_x(alpha, label),
        )
    return (
        projective_x_tilde_dual(alpha, label),
        layer.matter_clock(label),
        projective_x_dual(alpha, label),
    )


class GaugingMap:
    """Concrete gauging map for one layer.

    apply() is the scalable path (dense amplitudes, projector products);
    exact_matrix() enumerates the map at desk scale as an exact tensor of
    root-of-unity counts for zero-tolerance operator identities.
    """

    def __init__(self, layer: LayerSpec):
        self.layer = layer
        self.group = layer.group
        self.matter_sites = layer.matter_sites()
        self.new_sites = layer.new_sites()
        self.out_sites = self.matter_sites + self.new_sites
        size = self.group.size
        n = layer.n
        # Power p with unit-isometry map = |G|**p times the projector product.
        self.scale_power = (n - 1) / 2 if layer.boundary == "periodic" else n / 2
        self.in_dim = size**n
        self.out_dim = size ** len(self.out_sites)

    # -- building blocks ---------------------------------------------------

    def local_symmetry_op(self, i: int, label) -> ProductOperator:
        """The three-body symmetry enforced at matter site i."""
        layer = self.layer
        left, mid, right = _corner_ops(layer, label)
        x2 = layer.matter_positions()[i]
        row = layer.index
        if layer.boundary == "periodic":
            lpos = (x2 - 1) % (2 * layer.n)
            rpos = (x2 + 1) % (2 * layer.n)
        else:
            lpos, rpos = x2 - 1, x2 + 1
        factors = {
            (row + 1, lpos): left,
            (row, x2): mid,
            (row + 1, rpos): right,
        }
        kinds = {
            (row + 1, lpos): layer.new_kind,
            (row, x2): layer.matter_kind,
            (row + 1, rpos): layer.new_kind,
        }
        return ProductOperator.from_dict(factors, kinds, self.group.phase_modulus)

    def emergent_symmetry_op(self, label) -> ProductOperator:
        """Global diagonal symmetry on the new row; fixes the map's image.

        Even layers produce a dual-character symmetry on the edge row,
        odd layers a group-element symmetry on the vertex row.
        """
        if self.layer.parity == "even":
            mono = clock_z(label)
        else:
            mono = clock_z_dual(label)
        factors = {site: mono for site, _ in self.new_sites}
        kinds = {site: kind for site, kind in self.new_sites}
        return ProductOperator.from_dict(factors, kinds, self.group.phase_modulus)

    def charged_pair_ops(self, i: int, i_prime: int, label) -> tuple[ProductOperator, ProductOperator]:
        """A symmetric two-point operator and its image under the map.

        Returns (bare, dressed): bare = shift(label) at matter i and its
        adjoint at matter i_prime; dressed adds the diagonal string on the
        new sites strictly between them.  The map intertwines the two:
        G . bare = dressed . G.
        """
        if not 0 <= i < i_prime < self.layer.n:
            raise ValueError("need 0 <= i < i_prime < n")
        layer = self.layer
        if layer.parity == "even":
            sh = shift_x_dual(label)
            string_mono = clock_z(label)
        else:
            sh = shift_x(label)
            string_mono = clock_z_dual(label)
        row = layer.index
        pos = layer.matter_positions()
        bare_factors = {(row, pos[i]): sh, (row, pos[i_prime]): sh.adjoint()}
        bare_kinds = {(row, pos[i]): layer.matter_kind, (row, pos[i_prime]): layer.matter_kind}
        bare = ProductOperator.from_dict(bare_factors, bare_kinds, self.group.phase_modulus)
        dressed_factors = dict(bare_factors)
        dressed_kinds = dict(bare_kinds)
        for (site, kind) in self.new_sites:
            if pos[i] < site[1] < pos[i_prime]:
                dressed_factors[site] = string_mono
                dressed_kinds[site] = kind
        dressed = ProductOperator.from_dict(dressed_factors, dressed_kinds, self.group.phase_modulus)
        return bare, dressed

    # -- application to states ---------------------------------------------

    def apply(self, state: StateVector, cap: int | None = None) -> StateVector:
        layer = self.layer
        for (site, kind) in self.matter_sites:
            axis = state.axis_of(site)
            if state.kinds[axis] != kind:
                raise ValueError(f"matter site {site!r} has wrong kind")
        new_dim = state.amps.size * (self.group.size ** len(self.new_sites))
        if new_dim > dimension_cap(cap):
            raise CapExceededError(f"output would need {new_dim} amplitudes")
        size = self.group.size
        identity_local = np.zeros(size, dtype=complex)
        identity_local[0] = 1.0  # index 0 is the identity label
        extension = StateVector.product_state(self.new_sites, [identity_local] * len(self.new_sites))
        out = state.tensor(extension)
        labels = layer.labels()
        for i in range(layer.n):
            acc = None
            for label in labels:
                term = out.apply(self.local_symmetry_op(i, label))
                acc = term.amps if acc is None else acc + term.amps
            out = StateVector(out.site_ids, out.kinds, out.dims, acc / size)
        out.amps *= self.group.size**self.scale_power
        return out

    # -- exact dense form ----------------------------------------------------

    def exact_matrix(self, cap: int | None = None) -> PhaseTensor:
        """Exact (out, in, L) count tensor of the raw term sum.

        Rows are indexed by (matter config, new config) with matter sites
        first; the overall positive normalization is not included, so
        identities should be checked projectively or on both sides.
        """
        L = self.group.phase_modulus
        size = self.group.size
        n = self.layer.n
        if self.out_dim * self.in_dim * L > dimension_cap(cap):
            raise CapExceededError("exact tensor too large")
        alpha = self.layer.twist if self.layer.twist is not None else Cocycle.trivial(self.group)
        spec = self.group
        n_new = len(self.new_sites)
        counts = np.zeros((self.out_dim, self.in_dim, L), dtype=np.int64)
        # Per matter site, the diagonal phase of the matter representation,
        # as a (basis state, label) table.
        all_labels = [lab.exps for lab in self.layer.labels()]
        pair_table = np.array(
            [self.layer.matter_clock(lab).phase for lab in self.layer.labels()],
            dtype=np.int64,
        ).T
        m_configs = np.array(list(itertools.product(range(size), repeat=n)), dtype=np.int64)
        m_flat = np.zeros(len(m_configs), dtype=np.int64)
        for col in range(n):
            m_flat = m_flat * size + m_configs[:, col]
        open_bc = self.layer.boundary == "open"
        matter_pos = self.layer.matter_positions()
        new_pos = self.layer.new_positions()
        two_n = 2 * n
        for t_idx in itertools.product(range(size), repeat=n):
            t = [all_labels[k] for k in t_idx]
            by_pos = {}
            extra = 0
            if open_bc:
                left = spec.neg_exps(t[0])
                by_pos[matter_pos[0] - 1] = left
                extra += -alpha.exponent(left, t[0])
                for i in range(n - 1):
                    ket = spec.add_exps(t[i], spec.neg_exps(t[i + 1]))
                    by_pos[matter_pos[i] + 1] = ket
                    extra += -alpha.exponent(ket, t[i + 1])
                by_pos[matter_pos[n - 1] + 1] = t[n - 1]
            else:
                for i in range(n):
                    nxt = t[(i + 1) % n]
                    ket = spec.add_exps(t[i], spec.neg_exps(nxt))
                    by_pos[(matter_pos[i] + 1) % two_n] = ket
                    extra += -alpha.exponent(ket, nxt)
            new_flat = 0
            for p in new_pos:
                new_flat = new_flat * size + spec.index_of(by_pos[p])
            phases = extra + pair_table[m_configs[:, 0], t_idx[0]]
            for col in range(1, n):
                phases = phases + pair_table[m_configs[:, col], t_idx[col]]
            rows = m_flat * (size**n_new) + new_flat
            np.add.at(counts, (rows, m_flat, phases % L), 1)
        return PhaseTensor(counts)


def build_gauging_map(layer: LayerSpec) -> GaugingMap:
    return GaugingMap(layer)


def layer_stack(
    group: GroupSpec,
    n: int,
    num_layers: int,
    boundary: str = "periodic",
    twist_even: Cocycle | None = None,
    twist_odd: Cocycle | None = None,
) -> list[LayerSpec]:
    """Alternating layer specs starting from an even (vertex) matter row."""
    layers = []
    count = n
    offset = 0
    for j in range(num_layers):
        twist = twist_even if j % 2 == 0 else twist_odd
        layers.append(LayerSpec(group, j, count, boundary, twist, offset))
        if boundary == "open":
            count += 1
            offset -= 1
    return layers


def initial_state(group: GroupSpec, layer: LayerSpec, local=None) -> StateVector:
    """Product input on the layer's matter row; defaults to the identity label."""
    size = group.size
    if local is None:
        local = np.zeros(size, dtype=complex)
        local[0] = 1.0
    return StateVector.product_state(layer.matter_sites(), [np.asarray(local, complex)] * layer.n)


def compose_gauging(
    layers, input_state: StateVector, cap: int | None = None, norms_out: list | None = None
) -> StateVector:
    """Apply the maps in order; input supported on the first layer's matter row."""
    layers = list(layers)
    for prev, nxt in zip(layers, layers[1:]):
        if nxt.index != prev.index + 1:
            raise ValueError("layer indices must increase by one")
    state = input_state
    for layer in layers:
        state = build_gauging_map(layer).apply(state, cap=cap)
        if norms_out is not None:
            norms_out.append(state.norm())
    return state


# -- verification -----------------------------------------------------------


def verify_emergent_symmetry(gmap: GaugingMap, cap: int | None = None) -> dict:
    """Exact operator check that the new-row diagonal symmetry fixes the map."""
    exact = gmap.exact_matrix(cap=cap)
    out_dims = tuple(gmap.group.size for _ in gmap.out_sites)
    checks = []
    for label in gmap.layer.labels():
        op = gmap.emergent_symmetry_op(label)
        perm, phase = flatten_product_operator([s for s, _ in gmap.out_sites], out_dims, op)
        lhs = mono_mul_left(exact, perm, phase)
        ok = lhs == exact
        checks.append({"label": label.exps, "passed": bool(ok)})
    return {"name": "emergent_symmetry", "passed": all(c["passed"] for c in checks), "checks": checks}


def verify_string_order_mapping(layer: LayerSpec, i: int, i_prime: int, label, cap: int | None = None) -> dict:
    """Exact operator identity G . bare_pair = dressed_pair . G."""
    gmap = build_gauging_map(layer)
    exact = gmap.exact_matrix(cap=cap)
    bare, dressed = gmap.charged_pair_ops(i, i_prime, label)
    in_sites = [s for s, _ in gmap.matter_sites]
    in_dims = tuple(gmap.group.size for _ in in_sites)
    out_sites = [s for s, _ in gmap.out_sites]
    out_dims = tuple(gmap.group.size for _ in out_sites)
    perm_in, phase_in = flatten_product_operator(in_sites, in_dims, bare)
    perm_out, phase_out = flatten_product_operator(out_sites, out_dims, dressed)
    lhs = mono_mul_right(exact, perm_in, phase_in)
    rhs = mono_mul_left(exact, perm_out, phase_out)
    ok = lhs == rhs
    return {
        "name": "string_order_mapping",
        "i": i,
        "i_prime": i_prime,
        "label": label.exps,
        "passed": bool(ok),
    }


def stack_local_symmetry_ops(layers) -> list[tuple[str, ProductOperator]]:
    """Every local symmetry of the composed stack, with labels.

    Interior layers contribute four-body diamond operators (the raw
    three-body symmetry dressed by the next map's diagonal); the last
    layer contributes its raw three-body symmetries.
    """
    layers = list(layers)
    ops = []
    for k, layer in enumerate(layers):
        gmap = build_gauging_map(layer)
        for i in range(layer.n):
            x2 = layer.matter_positions()[i]
            for label in layer.labels():
                op = gmap.local_symmetry_op(i, label)
                if k + 1 < len(layers):
                    north_site = (layer.index + 2, x2)
                    if layer.parity == "even":
                        north = clock_z_dual(label).adjoint()
                        kind = SiteKind.VERTEX_DUAL
                    else:
                        north = clock_z(label).adjoint()
                        kind = SiteKind.EDGE_GROUP
                    op = op.multiply(
                        ProductOperator.from_dict(
                            {north_site: north}, {north_site: kind}, op.modulus
                        )
                    )
                name = f"layer{layer.index}/site{(layer.index, x2)}/label{label.exps}"
                ops.append((name, op))
    return ops


def verify_local_symmetry(state: StateVector, layers, tol: float = 1e-10) -> dict:
    """Check the composed state is fixed by every stack symmetry.

    The overlap itself must be 1 (eigenvalue +1), not just its modulus,
    so states excited into other eigenvalue sectors are caught.
    """
    base = state.normalized()
    checks = []
    for name, op in stack_local_symmetry_ops(layers):
        moved = base.apply(op)
        overlap = base.inner(moved)
        checks.append({"op": name, "overlap": overlap, "passed": bool(abs(overlap - 1) < tol)})
    return {
        "name": "local_symmetry",
        "passed": all(c["passed"] for c in checks),
        "violations": [c for c in checks if not c["passed"]],
        "num_checked": len(checks),
    }


def flatten_product_operator(site_ids, dims, op: ProductOperator):
    """Composite (perm, phase) arrays of a product operator on a full space."""
    total = int(np.prod(dims))
    perm = np.arange(total, dtype=np.int64)
    phase = np.zeros(total, dtype=np.int64)
    strides = []
    acc = 1
    for d in reversed(dims):
        strides.append(acc)
        acc *= d
    strides = list(reversed(strides))
    factor_map = op.factor_map()
    for site, mono in factor_map.items():
        axis = site_ids.index(site)
        d = dims[axis]
        digits = (perm // strides[axis]) % d
        local_perm = np.array(mono.perm, dtype=np.int64)
        local_phase = np.array(mono.phase, dtype=np.int64)
        phase = (phase + local_phase[digits]) % op.modulus
        perm = perm + (local_perm[digits] - digits) * strides[axis]
    return perm, phase


# -- zero dimensional gauging -------------------------------------------------


def zero_dim_gauge(group: GroupSpec, psi: StateVector, n_pairs: int, tol: float = 1e-12) -> StateVector:
    """Iterated gauging of a single symmetric site.

    Each round decouples a maximally entangled pair of group-labelled
    sites around the matter site, giving n_pairs nested pairs
    (1/sqrt(|G|)) sum_g |g^-1>|g>.  The input must be invariant under its
    site symmetry: the diagonal representation on a vertex site, the
    shift representation on an edge site.
    """
    if len(psi.site_ids) != 1:
        raise ValueError("zero_dim_gauge takes a single-site state")
    if psi.dims[0] != group.size:
        raise ValueError("state dimension does not match the group")
    if n_pairs < 0:
        raise ValueError("n_pairs must be nonnegative")
    kind = psi.kinds[0]
    for g in group.elements():
        mono = clock_z_dual(g) if kind == SiteKind.VERTEX_DUAL else shift_x(g)
        op = ProductOperator.from_dict(
            {psi.site_ids[0]: mono}, {psi.site_ids[0]: kind}, group.phase_modulus
        )
        moved = psi.apply(op)
        if np.max(np.abs(moved.amps - psi.amps)) > tol:
            raise ValueError("input state is not symmetric under the site representation")
    if n_pairs == 0:
        return psi.copy()
    size = group.size
    pair = np.zeros((size, size), dtype=complex)
    for g in group.elements():
        pair[group.index_of(g.inverse().exps), group.index_of(g.exps)] = 1.0
    pair = pair.reshape(-1) / math.sqrt(size)
    state = psi.copy()
    for k in range(1, n_pairs + 1):
        pair_state = StateVector(
            (("pair", k, "left"), ("pair", k, "right")),
            (SiteKind.EDGE_GROUP, SiteKind.EDGE_GROUP),
            (size, size),
            pair.copy(),
        )
        state = state.tensor(pair_state)
    order = [("pair", k, "left") for k in range(n_pairs, 0, -1)]
    order.append(psi.site_ids[0])
    order.extend(("pair", k, "right") for k in range(1, n_pairs + 1))
    return state.reordered(order)
