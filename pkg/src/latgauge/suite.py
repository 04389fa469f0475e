"""The full verification battery behind `gauge suite` and the acceptance tests.

Each criterion function returns a JSON-friendly dict with at least
{"name", "passed", "claim"}; run_suite collects them all with timings.
Sizes are chosen so the whole battery stays exact yet finishes in well
under five minutes; instances whose exact enumeration would exceed the
assignment cap are reported as skipped rather than silently dropped.
"""

from __future__ import annotations

import itertools
import math
import time

import numpy as np

from .boundary import (
    CLOCK,
    build_fixed_point_state,
    condensation_table,
    surviving_boundary_terms,
)
from .excitations import (
    StringSpec,
    braiding_phase,
    confinement_report,
    horizontal_string_path,
    string_operator,
    syndrome,
    vertical_string_path,
)
from .gauging import (
    LayerSpec,
    build_gauging_map,
    compose_gauging,
    initial_state,
    layer_stack,
    verify_emergent_symmetry,
    verify_local_symmetry,
    verify_string_order_mapping,
    zero_dim_gauge,
)
from .groups import (
    GroupSpec,
    all_subgroups,
    enumerate_cocycle_classes,
    pair,
    restricted_characters,
    slant_product,
)
from .lattice import (
    CapExceededError,
    CodeSpec,
    Lattice2D,
    build_boundary_terms,
    build_bulk_stabilizers,
    check_all_commute,
    ground_space_dimension,
    ground_space_dimension_dense,
    logical_operators,
)
from .operators import (
    FiniteGroupTable,
    ProductOperator,
    SiteKind,
    StateVector,
    clock_z,
    clock_z_dual,
    fusion_coefficients,
    irrep_flux_operator,
)
from .tensors import assemble_pepes, contract_mpo_layer, contract_pepes, pull_through_check

GROUPS = [(2,), (3,), (4,), (2, 2), (2, 3)]
TORI = [(2, 2), (3, 2), (4, 2), (2, 4), (3, 4), (4, 4)]  # (n, m)
CAP_BITS = 21.0
STATE_TOL = 1e-10


def _twist_combinations(group: GroupSpec):
    classes = enumerate_cocycle_classes(group)
    combos = []
    for even in classes:
        for odd in classes:
            combos.append((None if even.is_trivial else even, None if odd.is_trivial else odd))
    return combos


def criterion_commutation() -> dict:
    """Every stabilizer pair commutes exactly, all groups, tori, twist classes."""
    failures = []
    instances = 0
    for orders in GROUPS:
        group = GroupSpec(orders)
        for even, odd in _twist_combinations(group):
            for n, m in TORI:
                spec = CodeSpec(Lattice2D(group, n, m, "periodic"), twist_even=even, twist_odd=odd)
                rep = check_all_commute(build_bulk_stabilizers(spec))
                instances += 1
                if not rep["passed"]:
                    failures.append({"group": orders, "n": n, "m": m, "violations": rep["violations"][:3]})
    return {
        "name": "stabilizer_commutation",
        "claim": "all plaquette terms commute pairwise, untwisted and twisted",
        "passed": not failures,
        "instances": instances,
        "failures": failures,
    }


def criterion_ground_untwisted() -> dict:
    """Trace-formula ground dimension equals |G|**2 on every torus in reach."""
    results = []
    skipped = []
    ok = True
    for orders in GROUPS:
        group = GroupSpec(orders)
        for n, m in TORI:
            spec = CodeSpec(Lattice2D(group, n, m, "periodic"))
            entry = {"group": orders, "n": n, "m": m}
            try:
                dim = ground_space_dimension(spec, cap_bits=CAP_BITS)
            except CapExceededError:
                skipped.append(entry)
                continue
            entry["dimension"] = dim
            entry["expected"] = group.size**2
            if spec.lattice.total_dim <= 2**14:
                entry["dense"] = ground_space_dimension_dense(spec)
                if entry["dense"] != dim:
                    ok = False
            if dim != group.size**2:
                ok = False
            results.append(entry)
    return {
        "name": "ground_degeneracy_untwisted",
        "claim": "the untwisted torus code has |G|**2 ground states",
        "passed": ok,
        "instances": results,
        "skipped_over_cap": skipped,
    }


def criterion_ground_twisted() -> dict:
    """Twisted degeneracy |G| on tori whose row count is 2 mod 4.

    The product of all twisted group plaquettes equals a horizontal
    logical; with m/2 odd that forces the logical to +1 and cuts the
    degeneracy to |G|.  With m/2 even the constraint squares away for
    this exponent-two group, so those dimensions are reported, not
    asserted against the |G| value.
    """
    group = GroupSpec((2, 2))
    alpha = next(c for c in enumerate_cocycle_classes(group) if not c.is_trivial)
    entries = []
    ok = True
    for n, m in [(2, 2), (3, 2), (4, 2), (2, 6)]:
        spec = CodeSpec(Lattice2D(group, n, m, "periodic"), twist_even=alpha)
        dim = ground_space_dimension(spec, cap_bits=25.0)
        dense = ground_space_dimension_dense(spec) if spec.lattice.total_dim <= 2**14 else None
        entries.append({"n": n, "m": m, "dimension": dim, "dense": dense})
        if dim != group.size or (dense is not None and dense != dim):
            ok = False
    m4_spec = CodeSpec(Lattice2D(group, 2, 4, "periodic"), twist_even=alpha)
    m4_dim = ground_space_dimension(m4_spec, cap_bits=CAP_BITS)
    m4_dense = ground_space_dimension_dense(m4_spec, dim_cap=2**17)
    gamma_spec = CodeSpec(Lattice2D(group, 2, 2, "periodic"), twist_odd=alpha)
    gamma_dim = ground_space_dimension(gamma_spec, cap_bits=CAP_BITS)
    both_spec = CodeSpec(Lattice2D(group, 2, 2, "periodic"), twist_even=alpha, twist_odd=alpha)
    both_dim = ground_space_dimension(both_spec, cap_bits=CAP_BITS)
    return {
        "name": "ground_degeneracy_twisted",
        "claim": "an even-layer twist reduces the torus degeneracy to |G|",
        "passed": ok and m4_dim == m4_dense,
        "instances": entries,
        "m_divisible_by_four_dimension_reported": m4_dim,
        "odd_layer_twist_dimension_reported": gamma_dim,
        "both_layers_twisted_dimension_reported": both_dim,
    }


def criterion_frustration_free() -> dict:
    """Composed gauged states are +1 eigenstates of every bulk term."""
    cases = {
        (2,): [(2, 2), (2, 3), (3, 2), (4, 2), (4, 3)],
        (3,): [(2, 2), (2, 3), (3, 2), (4, 2)],
    }
    worst = 0.0
    checked = 0
    for orders, mns in cases.items():
        group = GroupSpec(orders)
        for m, n in mns:
            layers = layer_stack(group, n, m, "periodic")
            state = compose_gauging(layers, initial_state(group, layers[0])).normalized()
            rep = verify_local_symmetry(state, layers, tol=STATE_TOL)
            checked += rep["num_checked"]
            if not rep["passed"]:
                return {
                    "name": "frustration_free",
                    "claim": "gauged states satisfy every bulk stabilizer",
                    "passed": False,
                    "violations": rep["violations"][:5],
                }
            # Cross-module: the independently built lattice terms agree.
            spec = CodeSpec(Lattice2D(group, n, m, "open"))
            for term in build_bulk_stabilizers(spec):
                overlap = state.inner(state.apply(term.op))
                worst = max(worst, abs(overlap - 1))
                checked += 1
    return {
        "name": "frustration_free",
        "claim": "gauged states satisfy every bulk stabilizer",
        "passed": worst < STATE_TOL,
        "checked": checked,
        "worst_deviation": worst,
    }


def criterion_emergent_symmetry() -> dict:
    checks = []
    for orders in [(2,), (3,), (4,), (2, 2)]:
        group = GroupSpec(orders)
        for twist in enumerate_cocycle_classes(group):
            tw = None if twist.is_trivial else twist
            for index in (0, 1):
                for n in (2, 3):
                    layer = LayerSpec(group, index, n, "periodic", tw)
                    rep = verify_emergent_symmetry(build_gauging_map(layer))
                    checks.append(
                        {"group": orders, "layer": index, "n": n, "twisted": tw is not None,
                         "passed": rep["passed"]}
                    )
    return {
        "name": "emergent_symmetry",
        "claim": "the dual symmetry on the new row fixes every map exactly",
        "passed": all(c["passed"] for c in checks),
        "instances": len(checks),
        "failures": [c for c in checks if not c["passed"]],
    }


def criterion_string_order_mapping() -> dict:
    checks = []
    for orders in [(2,), (3,), (2, 2)]:
        group = GroupSpec(orders)
        for index in (0, 1):
            layer = LayerSpec(group, index, 3, "periodic")
            labels = list(group.characters()) if index == 0 else list(group.elements())
            for i, i_prime in [(0, 1), (0, 2), (1, 2)]:
                for lab in labels:
                    rep = verify_string_order_mapping(layer, i, i_prime, lab)
                    checks.append(rep["passed"])
    return {
        "name": "string_order_mapping",
        "claim": "two-point symmetric operators map to string order operators",
        "passed": all(checks),
        "instances": len(checks),
    }


def criterion_twisted_plaquette_product() -> dict:
    failures = []
    instances = 0
    for orders in [(2, 2), (4, 2)]:
        group = GroupSpec(orders)
        for alpha in enumerate_cocycle_classes(group):
            for n, m in [(2, 2), (3, 2)]:
                spec = CodeSpec(
                    Lattice2D(group, n, m, "periodic"),
                    twist_even=None if alpha.is_trivial else alpha,
                )
                terms = build_bulk_stabilizers(spec)
                for g in group.elements():
                    total = ProductOperator.identity_op(group.phase_modulus)
                    for t in terms:
                        if t.label.family == "group" and t.label.exps == g.exps:
                            total = t.op.multiply(total)
                    chi = slant_product(alpha, g)
                    lat = spec.lattice
                    expected_factors = {}
                    expected_kinds = {}
                    for j in lat.rows:
                        if j % 2 == 1:
                            for x2 in lat.row_positions(j):
                                expected_factors[(j, x2)] = clock_z(chi)
                                expected_kinds[(j, x2)] = SiteKind.EDGE_GROUP
                    expected = ProductOperator.from_dict(
                        expected_factors, expected_kinds, group.phase_modulus
                    )
                    instances += 1
                    if total != expected:
                        failures.append({"group": orders, "n": n, "m": m, "g": g.exps})
    return {
        "name": "twisted_plaquette_product",
        "claim": "the product of all twisted group plaquettes is the slant-product logical",
        "passed": not failures,
        "instances": instances,
        "failures": failures,
    }


def criterion_confinement() -> dict:
    group = GroupSpec((2, 2))
    alpha = next(c for c in enumerate_cocycle_classes(group) if not c.is_trivial)
    spec = CodeSpec(Lattice2D(group, 4, 8, "periodic"), twist_even=alpha)
    rep = confinement_report(spec, group.element((1, 0)))
    passed = (
        rep["single_violations"] == 3
        and rep["string_strictly_increasing"]
        and rep["dipole_constant"]
        and rep["dipole_braids_trivially"]
        and rep["bend_homomorphic"]
    )
    rep.update(
        {
            "name": "confinement",
            "claim": "twisted shifts are confined; their dipoles move vertically for free",
            "passed": passed,
        }
    )
    return rep


def criterion_braiding() -> dict:
    checks = []
    for orders in [(2,), (3,), (4,), (2, 2)]:
        group = GroupSpec(orders)
        spec = CodeSpec(Lattice2D(group, 3, 6, "periodic"))
        for g in group.elements():
            for chi in group.characters():
                xs = StringSpec(vertical_string_path(spec, 1, 1, 2), g, "X")
                zs = StringSpec(horizontal_string_path(spec, 1, 1, 3), chi, "Z")
                ph = braiding_phase(spec, zs, xs)
                expected = pair(chi, g)
                checks.append(ph is not None and ph == expected)
        # two crossings square the phase away for order-two labels
        g = next(e for e in group.elements() if not e.is_identity)
        chi = next(c for c in group.characters() if not c.is_identity)
        double = string_operator(
            spec, StringSpec(vertical_string_path(spec, 1, 1, 2), g, "X")
        ).multiply(
            string_operator(spec, StringSpec(vertical_string_path(spec, 3, 1, 2), g, "X"))
        )
        zs_op = string_operator(spec, StringSpec(horizontal_string_path(spec, 1, 1, 3), chi, "Z"))
        from .operators import commutation_phase

        ph2 = commutation_phase(zs_op, double)
        checks.append(ph2 == pair(chi, g) * pair(chi, g))
    return {
        "name": "braiding",
        "claim": "one crossing of a vertical shift string and a horizontal clock string braids by the pairing",
        "passed": all(checks),
        "instances": len(checks),
    }


def criterion_condensation() -> dict:
    entries = []
    ok = True
    for orders in [(2,), (4,), (2, 2)]:
        group = GroupSpec(orders)
        for sub in all_subgroups(group):
            chain = build_fixed_point_state(group, sub, 4, CLOCK)
            surviving, _ = surviving_boundary_terms(chain)
            expected = set(restricted_characters(group, sub))
            res_ok = surviving == expected
            lat = Lattice2D(group, 2, 4, "open")
            spec = CodeSpec(lat)
            table = condensation_table(spec, build_fixed_point_state(group, sub, 2, CLOCK))
            sub_exps = {h.exps for h in sub}
            cond_ok = all(
                table["group_anyons"][str(g.exps)]["condenses"] == (g.exps in sub_exps)
                for g in group.elements()
            )
            dual_ok = all(v["condenses"] for v in table["dual_anyons"].values())
            full_ok = True
            if len(sub) == group.size:
                nontrivial = [x for x in table["surviving"] if any(x)]
                full_ok = not nontrivial
            entries.append(
                {
                    "group": orders,
                    "subgroup": sorted(h.exps for h in sub),
                    "res_matches": res_ok,
                    "condensation_matches": cond_ok,
                    "dual_condense": dual_ok,
                    "empty_boundary_when_unbroken": full_ok,
                }
            )
            ok = ok and res_ok and cond_ok and dual_ok and full_ok
    return {
        "name": "boundary_condensation",
        "claim": "surviving boundary terms are the characters trivial on H; anyons in H condense",
        "passed": ok,
        "instances": entries,
    }


def criterion_tensor_network() -> dict:
    pull = []
    for orders in GROUPS:
        pull.append(pull_through_check(GroupSpec(orders))["passed"])
    mpo_ok = True
    mpo_checked = 0
    for orders in GROUPS:
        group = GroupSpec(orders)
        for index in (0, 1):
            for bc in ("periodic", "open"):
                for n in (2, 3):
                    layer = LayerSpec(group, index, n, bc, None, offset=-index if bc == "open" else 0)
                    gmap = build_gauging_map(layer)
                    if gmap.out_dim * gmap.in_dim * group.phase_modulus > 2**24:
                        continue
                    ratio = contract_mpo_layer(layer).proportional(gmap.exact_matrix())
                    mpo_checked += 1
                    if ratio is None or ratio <= 0:
                        mpo_ok = False
    pepes_ok = True
    for orders in [(2,), (3,)]:
        group = GroupSpec(orders)
        layers = layer_stack(group, 2, 2, "periodic")
        st = initial_state(group, layers[0])
        direct = compose_gauging(layers, st).normalized()
        via_tn = contract_pepes(assemble_pepes(layers), st).normalized().reordered(direct.site_ids)
        if abs(abs(direct.inner(via_tn)) - 1) > STATE_TOL:
            pepes_ok = False
    trapezoid = assemble_pepes(layer_stack(GroupSpec((2,)), 2, 3, "open")).row_sizes()
    return {
        "name": "tensor_network",
        "claim": "tensor identities hold exactly and the MPO path equals the dense path",
        "passed": all(pull) and mpo_ok and pepes_ok and trapezoid == [2, 3, 4, 5],
        "pull_through_groups_passed": all(pull),
        "mpo_layers_checked": mpo_checked,
        "pepes_fidelity_ok": pepes_ok,
        "trapezoid_row_sizes": trapezoid,
    }


def _s3_table() -> tuple[FiniteGroupTable, np.ndarray]:
    """The symmetric group on three letters with its character table.

    Elements ordered: identity, the three transpositions, the two
    3-cycles.  Characters per element: trivial, sign, two-dimensional.
    """
    perms = [
        (0, 1, 2),
        (1, 0, 2),
        (0, 2, 1),
        (2, 1, 0),
        (1, 2, 0),
        (2, 0, 1),
    ]
    index = {p: i for i, p in enumerate(perms)}
    mult = tuple(
        tuple(index[tuple(p[q[k]] for k in range(3))] for q in perms) for p in perms
    )
    chars = np.array(
        [
            [1, 1, 1, 1, 1, 1],
            [1, -1, -1, -1, 1, 1],
            [2, 0, 0, 0, -1, -1],
        ],
        dtype=complex,
    )
    return FiniteGroupTable(mult), chars


def _exact_unit_root(k: int, modulus: int) -> complex:
    """Exact complex value of w**k whenever it is a fourth root of unity."""
    num = 4 * (k % modulus)
    if num % modulus == 0:
        return (1, 1j, -1, -1j)[(num // modulus) % 4]
    return complex(np.exp(2j * np.pi * k / modulus))


def criterion_flux_fusion() -> dict:
    checks = []
    # Abelian: one-dimensional characters fuse by multiplication and factorize.
    group = GroupSpec((2, 2))
    chars = np.array(
        [
            [_exact_unit_root(pair(chi, g).k, group.phase_modulus) for g in group.elements()]
            for chi in group.characters()
        ]
    )
    table = FiniteGroupTable(
        tuple(
            tuple(group.index_of((a * b).exps) for b in group.elements())
            for a in group.elements()
        )
    )
    coeffs = fusion_coefficients(chars)
    for n_sites in (2, 3):
        ops = [irrep_flux_operator(table, chars[k], n_sites) for k in range(len(chars))]
        for s, r in itertools.product(range(len(chars)), repeat=2):
            lhs = ops[s].multiply(ops[r]).diag
            rhs = sum(coeffs[s, r, t] * ops[t].diag for t in range(len(chars)))
            checks.append(float(np.max(np.abs(lhs - rhs))) == 0.0)
        # factorization into site-local clocks
        for k, chi in enumerate(group.characters()):
            local = chars[k]
            factor = np.ones(1, dtype=complex)
            for _ in range(n_sites):
                factor = np.kron(factor, local)
            checks.append(float(np.max(np.abs(ops[k].diag - factor))) == 0.0)
    s3, s3_chars = _s3_table()
    s3_coeffs = fusion_coefficients(s3_chars)
    for n_sites in (2, 3):
        ops = [irrep_flux_operator(s3, s3_chars[k], n_sites) for k in range(3)]
        for s, r in itertools.product(range(3), repeat=2):
            lhs = ops[s].multiply(ops[r]).diag
            rhs = sum(s3_coeffs[s, r, t] * ops[t].diag for t in range(3))
            checks.append(float(np.max(np.abs(lhs - rhs))) == 0.0)
    two_dim_square = s3_coeffs[2, 2].tolist()
    return {
        "name": "flux_fusion",
        "claim": "diagonal flux operators fuse with the character multiplicities",
        "passed": all(checks),
        "instances": len(checks),
        "two_dim_irrep_square": two_dim_square,
    }


def criterion_rainbow() -> dict:
    checks = []
    details = {}
    for orders in [(2,), (3,), (2, 2)]:
        group = GroupSpec(orders)
        size = group.size
        local = np.zeros(size, dtype=complex)
        local[0] = 1.0
        psi = StateVector((("m", 0),), (SiteKind.VERTEX_DUAL,), (size,), local)
        for n_pairs in (0, 1, 2, 3):
            out = zero_dim_gauge(group, psi, n_pairs)
            ent = out.entanglement_entropy(n_pairs)
            expected = n_pairs * math.log(size)
            checks.append(abs(ent - expected) < STATE_TOL)
            checks.append(abs(out.norm() - 1) < STATE_TOL)
        details[str(orders)] = "ok"
    # the two-site pair for the order-two group is the uniform diagonal pair
    group = GroupSpec((2,))
    psi = StateVector((("m", 0),), (SiteKind.VERTEX_DUAL,), (2,), np.array([1.0, 0.0], complex))
    out = zero_dim_gauge(group, psi, 1)
    pair_amps = out.amps.reshape(2, 2, 2)[:, 0, :].reshape(-1)
    checks.append(np.allclose(pair_amps, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-12))
    return {
        "name": "rainbow_pairs",
        "claim": "iterated zero-dimensional gauging yields nested maximally entangled pairs",
        "passed": all(checks),
        "instances": len(checks),
    }


CRITERIA = [
    criterion_commutation,
    criterion_ground_untwisted,
    criterion_ground_twisted,
    criterion_frustration_free,
    criterion_emergent_symmetry,
    criterion_string_order_mapping,
    criterion_twisted_plaquette_product,
    criterion_confinement,
    criterion_braiding,
    criterion_condensation,
    criterion_tensor_network,
    criterion_flux_fusion,
    criterion_rainbow,
]


def run_suite(echo=None) -> dict:
    """Run every criterion and return the report.

    Reports are fully deterministic: timings are echoed for humans but
    kept out of the returned dict, so identical configurations serialize
    byte-identically.
    """
    results = []
    for fn in CRITERIA:
        t0 = time.time()
        rep = fn()
        results.append(rep)
        if echo is not None:
            status = "PASS" if rep["passed"] else "FAIL"
            echo(f"[{status}] {rep['name']} ({time.time() - t0:.2f}s)")
    return {
        "schema_version": 1,
        "command": "suite",
        "config": {},
        "checks": results,
        "passed": all(r["passed"] for r in results),
    }
