"""Gauging maps: normalization, emergent identities, composition, pairs."""

import math

import numpy as np
import pytest

from latgauge.gauging import (
    CapExceededError,
    LayerSpec,
    build_gauging_map,
    compose_gauging,
    initial_state,
    layer_stack,
    stack_local_symmetry_ops,
    verify_emergent_symmetry,
    verify_local_symmetry,
    verify_string_order_mapping,
    zero_dim_gauge,
)
from latgauge.groups import Cocycle, GroupSpec, enumerate_cocycle_classes
from latgauge.operators import ProductOperator, SiteKind, StateVector, clock_z_dual, shift_x

Z2 = GroupSpec((2,))
Z3 = GroupSpec((3,))
Z22 = GroupSpec((2, 2))


def symmetric_random_state(group, layer, seed):
    """Project a random input onto the diagonal-symmetry sector."""
    rng = np.random.default_rng(seed)
    size = group.size
    dim = size**layer.n
    raw = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    base = initial_state(group, layer)
    stv = StateVector(base.site_ids, base.kinds, base.dims, raw)
    acc = np.zeros(dim, dtype=complex)
    for g in group.elements():
        op = ProductOperator.from_dict(
            {s: clock_z_dual(g) for s in stv.site_ids},
            {s: SiteKind.VERTEX_DUAL for s in stv.site_ids},
            group.phase_modulus,
        )
        acc += stv.apply(op).amps
    out = StateVector(stv.site_ids, stv.kinds, stv.dims, acc / size)
    return out.normalized()


class TestSingleMap:
    @pytest.mark.parametrize(
        "group,n,bc",
        [(Z2, 2, "periodic"), (Z2, 3, "periodic"), (Z3, 2, "periodic"),
         (Z2, 2, "open"), (Z3, 3, "open"), (Z22, 2, "periodic")],
    )
    def test_symmetric_inputs_map_to_unit_norm(self, group, n, bc):
        layer = LayerSpec(group, 0, n, bc)
        gmap = build_gauging_map(layer)
        assert abs(gmap.apply(initial_state(group, layer)).norm() - 1) < 1e-12
        sym = symmetric_random_state(group, layer, 11)
        assert abs(gmap.apply(sym).norm() - 1) < 1e-10

    def test_local_symmetry_fixes_single_map_output(self):
        layer = LayerSpec(Z2, 0, 2, "periodic")
        gmap = build_gauging_map(layer)
        out = gmap.apply(symmetric_random_state(Z2, layer, 2))
        for i in range(layer.n):
            for g in Z2.elements():
                moved = out.apply(gmap.local_symmetry_op(i, g))
                assert np.max(np.abs(moved.amps - out.amps)) < 1e-12

    def test_twist_trivial_equals_untwisted(self):
        trivial = Cocycle.trivial(Z22)
        a = build_gauging_map(LayerSpec(Z22, 0, 2, "periodic", None)).exact_matrix()
        b = build_gauging_map(LayerSpec(Z22, 0, 2, "periodic", trivial)).exact_matrix()
        assert a == b
        # and the state path produces byte-identical amplitudes
        plain = compose_gauging(layer_stack(Z22, 2, 2), initial_state(Z22, LayerSpec(Z22, 0, 2)))
        dressed = compose_gauging(
            layer_stack(Z22, 2, 2, twist_even=trivial, twist_odd=trivial),
            initial_state(Z22, LayerSpec(Z22, 0, 2)),
        )
        assert np.array_equal(plain.amps, dressed.amps)

    def test_dimension_cap_guard(self):
        layer = LayerSpec(Z3, 0, 3, "periodic")
        with pytest.raises(CapExceededError):
            build_gauging_map(layer).apply(initial_state(Z3, layer), cap=100)

    def test_matter_representation_hook(self):
        # A conjugated clock representation gauges identically at the level
        # of the map identities; and broken representations are rejected.
        from latgauge.operators import MonomialOperator, clock_z_dual

        rep = {}
        for g in Z3.elements():
            base = clock_z_dual(g)
            rep[g.exps] = MonomialOperator(
                base.dim,
                base.perm,
                tuple(base.phase[(i + 1) % base.dim] for i in range(base.dim)),
                base.modulus,
            )
        layer = LayerSpec(Z3, 0, 2, "periodic", matter_rep=tuple(rep.items()))
        gmap = build_gauging_map(layer)
        assert verify_emergent_symmetry(gmap)["passed"]
        # invariant input of the conjugated representation: the basis state
        # whose shifted phase row is identically zero, index 2 here
        local = np.zeros(3, dtype=complex)
        local[2] = 1.0
        out = gmap.apply(initial_state(Z3, layer, local))
        assert abs(out.norm() - 1) < 1e-12
        for i in range(layer.n):
            for g in Z3.elements():
                moved = out.apply(gmap.local_symmetry_op(i, g))
                assert np.max(np.abs(moved.amps - out.amps)) < 1e-12
        bad = dict(rep)
        bad[(1,)] = MonomialOperator(3, (0, 1, 2), (0, 0, 1), 3)
        with pytest.raises(ValueError):
            LayerSpec(Z3, 0, 2, "periodic", matter_rep=tuple(bad.items()))


class TestEmergentSymmetry:
    @pytest.mark.parametrize("group", [Z2, Z3, Z22])
    @pytest.mark.parametrize("index", [0, 1])
    def test_untwisted(self, group, index):
        layer = LayerSpec(group, index, 2, "periodic")
        assert verify_emergent_symmetry(build_gauging_map(layer))["passed"]

    def test_twisted_keeps_the_same_symmetry(self):
        alpha = enumerate_cocycle_classes(Z22)[1]
        for index in (0, 1):
            layer = LayerSpec(Z22, index, 2, "periodic", alpha)
            assert verify_emergent_symmetry(build_gauging_map(layer))["passed"]

    def test_open_boundary(self):
        layer = LayerSpec(Z3, 0, 2, "open")
        assert verify_emergent_symmetry(build_gauging_map(layer))["passed"]

    def test_open_boundary_twisted(self):
        alpha = enumerate_cocycle_classes(Z22)[1]
        for index in (0, 1):
            layer = LayerSpec(Z22, index, 2, "open", alpha, offset=-index)
            assert verify_emergent_symmetry(build_gauging_map(layer))["passed"]


class TestStringOrderMapping:
    @pytest.mark.parametrize("group", [Z2, Z3])
    def test_exact_identity_all_pairs(self, group):
        for index in (0, 1):
            layer = LayerSpec(group, index, 3, "periodic")
            labels = group.characters() if index == 0 else group.elements()
            for lab in labels:
                for i, ip in [(0, 1), (0, 2), (1, 2)]:
                    assert verify_string_order_mapping(layer, i, ip, lab)["passed"]

    def test_identity_label_trivial(self):
        layer = LayerSpec(Z3, 1, 3, "periodic")
        rep = verify_string_order_mapping(layer, 0, 2, Z3.identity())
        assert rep["passed"]

    def test_invalid_positions_rejected(self):
        layer = LayerSpec(Z2, 0, 3, "periodic")
        gmap = build_gauging_map(layer)
        with pytest.raises(ValueError):
            gmap.charged_pair_ops(2, 1, Z2.dual_identity())


class TestCompose:
    def test_single_layer_reduces_to_map(self):
        layer = LayerSpec(Z2, 0, 2, "periodic")
        st = initial_state(Z2, layer)
        a = compose_gauging([layer], st)
        b = build_gauging_map(layer).apply(st)
        assert np.max(np.abs(a.amps - b.amps)) < 1e-14

    @pytest.mark.parametrize("group,twist_idx", [(Z2, 0), (Z22, 1)])
    def test_stack_symmetries_hold(self, group, twist_idx):
        twist = enumerate_cocycle_classes(group)[twist_idx]
        layers = layer_stack(group, 2, 3, "periodic", twist_even=None if twist.is_trivial else twist)
        out = compose_gauging(layers, initial_state(group, layers[0]))
        rep = verify_local_symmetry(out, layers)
        assert rep["passed"], rep["violations"]

    def test_equals_ordered_projector_action_on_stacked_product(self):
        # Independent construction: lay out the full product state first,
        # then apply every local projector in layer order.
        group = Z2
        layers = layer_stack(group, 2, 2, "periodic")
        st = symmetric_random_state(group, layers[0], 9)
        composed = compose_gauging(layers, st)

        full_sites = list(zip(st.site_ids, st.kinds))
        locals_ = [st]
        for layer in layers:
            gmap = build_gauging_map(layer)
            e_local = np.zeros(group.size, dtype=complex)
            e_local[0] = 1.0
            locals_.append(
                StateVector.product_state(gmap.new_sites, [e_local] * len(gmap.new_sites))
            )
        stacked = locals_[0]
        for extra in locals_[1:]:
            stacked = stacked.tensor(extra)
        for layer in layers:
            gmap = build_gauging_map(layer)
            for i in range(layer.n):
                acc = np.zeros_like(stacked.amps)
                for label in layer.labels():
                    acc += stacked.apply(gmap.local_symmetry_op(i, label)).amps
                stacked = StateVector(stacked.site_ids, stacked.kinds, stacked.dims, acc / group.size)
            stacked = StateVector(
                stacked.site_ids, stacked.kinds, stacked.dims,
                stacked.amps * group.size**gmap.scale_power,
            )
        reordered = stacked.reordered(composed.site_ids)
        assert np.max(np.abs(reordered.amps - composed.amps)) < 1e-10

    def test_corrupted_state_fails_exactly_adjacent_symmetries(self):
        group = Z2
        layers = layer_stack(group, 3, 2, "periodic")
        out = compose_gauging(layers, initial_state(group, layers[0]))
        corrupt_site = (1, 1)
        op = ProductOperator.from_dict(
            {corrupt_site: shift_x(group.element((1,)))},
            {corrupt_site: SiteKind.EDGE_GROUP},
            group.phase_modulus,
        )
        corrupted = out.apply(op)
        rep = verify_local_symmetry(corrupted, layers)
        failing = {c["op"] for c in rep["violations"]}
        # Syndrome oracle: symmetries whose operator fails to commute with
        # the corruption are exactly the ones that must break.
        expected = set()
        for name, sym_op in stack_local_symmetry_ops(layers):
            from latgauge.operators import commutation_phase

            ph = commutation_phase(sym_op, op)
            if ph is None or not ph.is_one:
                expected.add(name)
        assert failing == expected
        assert expected  # the corruption is detectable

    def test_gauged_expectation_preservation(self):
        # <psi|O|psi> = <G psi|dressed O|G psi> for symmetric two-point O.
        group = Z3
        layer = LayerSpec(group, 0, 3, "periodic")
        gmap = build_gauging_map(layer)
        for seed in (1, 2, 3):
            psi = symmetric_random_state(group, layer, seed)
            gauged = gmap.apply(psi)
            for chi in group.characters():
                bare, dressed = gmap.charged_pair_ops(0, 2, chi)
                lhs = psi.inner(psi.apply(bare))
                rhs = gauged.inner(gauged.apply(dressed))
                assert abs(lhs - rhs) < 1e-10

    def test_norms_recorded(self):
        layers = layer_stack(Z2, 2, 3, "periodic")
        norms = []
        compose_gauging(layers, initial_state(Z2, layers[0]), norms_out=norms)
        assert len(norms) == 3 and all(abs(x - 1) < 1e-10 for x in norms)

    def test_open_boundary_trapezoid_rows(self):
        layers = layer_stack(Z2, 2, 3, "open")
        out = compose_gauging(layers, initial_state(Z2, layers[0]))
        rows = {}
        for sid in out.site_ids:
            rows.setdefault(sid[0], []).append(sid[1])
        assert {j: len(v) for j, v in rows.items()} == {0: 2, 1: 3, 2: 4, 3: 5}
        assert verify_local_symmetry(out, layers)["passed"]


class TestZeroDimGauge:
    def one_site(self, group):
        size = group.size
        local = np.zeros(size, dtype=complex)
        local[0] = 1.0
        return StateVector((("m", 0),), (SiteKind.VERTEX_DUAL,), (size,), local)

    def test_bell_pair_for_order_two(self):
        out = zero_dim_gauge(Z2, self.one_site(Z2), 1)
        # pair sites around the matter site; matter amplitude is |identity>
        amps = out.amps.reshape(2, 2, 2)
        pair_block = amps[:, 0, :].reshape(-1)
        assert np.allclose(pair_block, np.array([1, 0, 0, 1]) / math.sqrt(2), atol=1e-12)
        assert np.allclose(amps[:, 1, :], 0)

    @pytest.mark.parametrize("group", [Z2, Z3, Z22])
    def test_midpoint_entropy(self, group):
        for n_pairs in range(4):
            out = zero_dim_gauge(group, self.one_site(group), n_pairs)
            ent = out.entanglement_entropy(n_pairs)
            assert abs(ent - n_pairs * math.log(group.size)) < 1e-10

    def test_inverse_labels_in_the_pair(self):
        out = zero_dim_gauge(Z3, self.one_site(Z3), 1)
        amps = out.amps.reshape(3, 3, 3)
        for g in Z3.elements():
            left = Z3.index_of(g.inverse().exps)
            right = Z3.index_of(g.exps)
            assert abs(amps[left, 0, right] - 1 / math.sqrt(3)) < 1e-12

    def test_zero_rounds_is_identity(self):
        psi = self.one_site(Z3)
        out = zero_dim_gauge(Z3, psi, 0)
        assert np.array_equal(out.amps, psi.amps)

    def test_asymmetric_input_rejected(self):
        bad = StateVector((("m", 0),), (SiteKind.VERTEX_DUAL,), (2,), np.array([0, 1], complex))
        with pytest.raises(ValueError):
            zero_dim_gauge(Z2, bad, 1)
