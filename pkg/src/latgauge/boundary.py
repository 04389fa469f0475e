"""1D symmetric inputs, string order, and boundary condensation.

The open vertical boundary of the 2D code is controlled by the quantum
phase of the 1D state fed into the first gauging map.  Phases of a global
symmetry are labelled by the unbroken subgroup H; the renormalization
fixed point of each phase is an explicit product-of-cosets state whose
string order parameters are exactly 0 or 1.

Two equivalent conventions are exposed.  In the shift convention the chain
carries EDGE_GROUP sites with the symmetry acting by shifts and the order
parameters are diagonal clock pairs.  In the clock convention (the one the
2D code uses for its first row) the chain carries VERTEX_DUAL sites, the
symmetry acts by the diagonal clocks, and the order parameters are
character shift pairs joined by a slant-product string.  A sitewise
Fourier rotation maps one convention onto the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groups import (
    Cocycle,
    DualCharacter,
    GroupElement,
    GroupSpec,
    is_subgroup,
    pair,
    restricted_characters,
)
from .lattice import CodeSpec, build_boundary_terms
from .operators import (
    ProductOperator,
    SiteKind,
    StateVector,
    clock_z,
    clock_z_dual,
    commutation_phase,
    projective_x_dual,
    projective_x_tilde_dual,
    shift_x,
    shift_x_dual,
)

SHIFT = "shift_symmetry"
CLOCK = "clock_symmetry"


@dataclass
class SymmetricState1D:
    group: GroupSpec
    unbroken: tuple
    n: int
    convention: str
    state: StateVector
    periodic: bool = True

    @property
    def site_ids(self) -> tuple:
        return self.state.site_ids

    def site_at(self, i: int):
        return self.state.site_ids[i % self.n if self.periodic else i]


def _chain_sites(group: GroupSpec, n: int, convention: str):
    if convention == CLOCK:
        return [((0, 2 * k), SiteKind.VERTEX_DUAL) for k in range(n)]
    return [(("s", k), SiteKind.EDGE_GROUP) for k in range(n)]


def fourier_matrix(group: GroupSpec) -> np.ndarray:
    """Sitewise rotation mapping shifts onto clocks.

    F |g> = |G|**-0.5 sum_chi chi(g) |chi>; conjugation sends the shift
    representation to the diagonal clock representation.
    """
    size = group.size
    mat = np.zeros((size, size), dtype=complex)
    for chi in group.characters():
        for g in group.elements():
            k = group.pair_exponent(chi.exps, g.exps)
            mat[group.index_of(chi.exps), group.index_of(g.exps)] = np.exp(
                2j * np.pi * k / group.phase_modulus
            )
    return mat / math.sqrt(size)


def build_fixed_point_state(
    group: GroupSpec, subgroup, n: int, convention: str = CLOCK, periodic: bool = True
) -> SymmetricState1D:
    """Fixed-point representative of the phase with unbroken subgroup H.

    In the shift convention the state is the normalized sum over cosets of
    (coset indicator)**n; H = G gives the uniform product state and
    H = {e} the Greenberger-Horne-Zeilinger style sum over diagonals.
    """
    subgroup = tuple(h if isinstance(h, GroupElement) else group.element(h) for h in subgroup)
    if not is_subgroup(group, subgroup):
        raise ValueError("unbroken set is not a closed subgroup")
    if n < 2:
        raise ValueError("need at least two sites")
    size = group.size
    plus_h = np.zeros(size, dtype=complex)
    for h in subgroup:
        plus_h[group.index_of(h.exps)] = 1.0
    plus_h /= math.sqrt(len(subgroup))
    amps = np.zeros(size**n, dtype=complex)
    for g in group.elements():
        local = np.zeros(size, dtype=complex)
        for h in subgroup:
            local[group.index_of((g * h).exps)] = 1.0
        local /= math.sqrt(len(subgroup))
        term = np.ones(1, dtype=complex)
        for _ in range(n):
            term = np.kron(term, local)
        amps += term
    amps /= np.linalg.norm(amps)
    if convention == CLOCK:
        f = fourier_matrix(group)
        tensor = amps.reshape((size,) * n)
        for axis in range(n):
            tensor = np.tensordot(f, tensor, axes=([1], [axis]))
            tensor = np.moveaxis(tensor, 0, axis)
        amps = tensor.reshape(-1)
    sites = _chain_sites(group, n, convention)
    state = StateVector(
        tuple(s for s, _ in sites), tuple(k for _, k in sites), (size,) * n, amps
    )
    return SymmetricState1D(group, subgroup, n, convention, state, periodic)


def symmetry_operator(chain: SymmetricState1D, g: GroupElement) -> ProductOperator:
    mono = shift_x(g) if chain.convention == SHIFT else clock_z_dual(g)
    kind = SiteKind.EDGE_GROUP if chain.convention == SHIFT else SiteKind.VERTEX_DUAL
    factors = {s: mono for s in chain.site_ids}
    kinds = {s: kind for s in chain.site_ids}
    return ProductOperator.from_dict(factors, kinds, chain.group.phase_modulus)


def string_order_operator(
    chain: SymmetricState1D, chi: DualCharacter, beta: Cocycle | None, i: int, ell: int
) -> ProductOperator:
    """Endpoint pair joined by the slant-product string, as an operator.

    Clock convention: conjugate projective character shift at site i, the
    plain one at site i+ell, and the diagonal clock of the slant product
    on the ell-1 interior sites.  Shift convention: diagonal clock pair
    at the endpoints (trivial beta only).
    """
    group = chain.group
    beta = beta if beta is not None else Cocycle.trivial(group)
    if ell < 1:
        raise ValueError("ell must be at least 1")
    if chain.periodic:
        if ell >= chain.n:
            raise ValueError("string longer than the chain")
    elif i + ell >= chain.n:
        raise ValueError("string leaves the open chain")
    sites = [chain.site_at(i + k) for k in range(ell + 1)]
    factors = {}
    kinds = {}
    if chain.convention == CLOCK:
        slant = GroupElement(group, _slant_exps(beta, chi.exps))
        factors[sites[0]] = projective_x_tilde_dual(beta, chi)
        factors[sites[-1]] = projective_x_dual(beta, chi)
        for s in sites[1:-1]:
            factors[s] = clock_z_dual(slant)
        kinds = {s: SiteKind.VERTEX_DUAL for s in sites}
    else:
        if not beta.is_trivial:
            raise ValueError("diagonal endpoints support only the trivial boundary class")
        factors[sites[0]] = clock_z(chi)
        factors[sites[-1]] = clock_z(chi).adjoint()
        kinds = {sites[0]: SiteKind.EDGE_GROUP, sites[-1]: SiteKind.EDGE_GROUP}
    return ProductOperator.from_dict(factors, kinds, group.phase_modulus)


def _slant_exps(beta: Cocycle, chi_exps) -> tuple:
    """Slant product on raw exponent tuples (see groups.slant_product)."""
    spec = beta.group
    orders = spec.orders
    out = []
    for k in range(len(orders)):
        acc = 0
        for j in range(k + 1, len(orders)):
            d = math.gcd(orders[k], orders[j])
            acc += (orders[k] // d) * beta.pmatrix[k][j] * chi_exps[j]
        for i in range(k):
            d = math.gcd(orders[i], orders[k])
            acc -= (orders[k] // d) * beta.pmatrix[i][k] * chi_exps[i]
        out.append(acc % orders[k])
    return tuple(out)


def string_order_expectation(
    chain: SymmetricState1D, chi: DualCharacter, beta: Cocycle | None, i: int, ell: int
) -> complex:
    op = string_order_operator(chain, chi, beta, i, ell)
    return chain.state.inner(chain.state.apply(op))


def surviving_boundary_terms(
    chain: SymmetricState1D, beta: Cocycle | None = None, ells=None, tol: float = 1e-9
) -> tuple[set, dict]:
    """Characters whose boundary term stabilizes the gauged state.

    A term survives when the string order parameter equals one for every
    tested length; raw expectation values are returned alongside so
    non-fixed-point inputs are not silently rounded.
    """
    if ells is None:
        ells = range(1, min(4, chain.n))
    raw = {}
    surviving = set()
    for chi in chain.group.characters():
        values = [string_order_expectation(chain, chi, beta, 0, ell) for ell in ells]
        raw[chi.exps] = values
        if all(abs(v - 1) < tol for v in values):
            surviving.add(chi)
    return surviving, raw


def condensation_table(spec: CodeSpec, chain: SymmetricState1D) -> dict:
    """Which anyons condense on the bottom boundary set by `chain`.

    Group-labelled vertical strings condense iff they commute with every
    surviving boundary term; character-labelled strings are checked the
    same way.  The report carries a witness term for each blocked anyon.
    """
    lat = spec.lattice
    if lat.vertical != "open":
        raise ValueError("condensation needs an open vertical boundary")
    if chain.convention != CLOCK or chain.n != lat.n:
        raise ValueError("boundary state must be a clock-convention chain of matching width")
    beta = spec.boundary_beta
    surviving, raw = surviving_boundary_terms(chain, beta)
    # Build the surviving three-body terms themselves.
    res_spec = CodeSpec(
        lattice=lat,
        twist_even=spec.twist_even,
        twist_odd=spec.twist_odd,
        boundary_beta=beta,
        subgroup_bottom=None,
        subgroup_top=spec.subgroup_top,
        orientation=spec.orientation,
    )
    terms = [
        t
        for t in build_boundary_terms(res_spec, "bottom")
        if any(t.label.exps == chi.exps for chi in surviving)
    ]
    group = spec.group
    report = {"surviving": sorted(chi.exps for chi in surviving), "raw_expectations": {
        str(k): [complex(v) for v in vals] for k, vals in raw.items()
    }, "group_anyons": {}, "dual_anyons": {}}
    for g in group.elements():
        mono = shift_x(g)
        col = 1
        factors = {}
        kinds = {}
        for j in range(1, lat.m, 2):
            factors[(j, col)] = mono
            kinds[(j, col)] = SiteKind.EDGE_GROUP
        string = ProductOperator.from_dict(factors, kinds, group.phase_modulus)
        witness = _first_violation(terms, string)
        report["group_anyons"][str(g.exps)] = {
            "condenses": witness is None,
            "witness": witness,
        }
    for chi in group.characters():
        mono = shift_x_dual(chi)
        col = 0
        factors = {}
        kinds = {}
        for j in range(0, lat.m + 1, 2):
            factors[(j, col)] = mono
            kinds[(j, col)] = SiteKind.VERTEX_DUAL
        string = ProductOperator.from_dict(factors, kinds, group.phase_modulus)
        witness = _first_violation(terms, string)
        report["dual_anyons"][str(chi.exps)] = {
            "condenses": witness is None,
            "witness": witness,
        }
    return report


def _first_violation(terms, op) -> dict | None:
    for t in terms:
        ph = commutation_phase(t.op, op)
        if ph is None or not ph.is_one:
            return {"term": t.label.as_json(), "phase": None if ph is None else ph.k}
    return None
