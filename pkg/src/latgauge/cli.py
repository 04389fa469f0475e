"""Command line front end.

Every subcommand validates its configuration, runs the requested checks,
prints a short human summary, and writes (or prints) a JSON report with a
versioned schema:

    {"schema_version": 1, "command": ..., "config": {...},
     "checks": [{"name", "passed", ...}], "passed": bool}

Exit codes: 0 all checks passed, 1 at least one check failed, 2 bad
configuration.  Reports contain no timings or other nondeterministic
fields, so identical configurations produce byte-identical output.  The
amplitude cap (default 2**24) can be overridden with GAUGE_MAX_DIM or
--max-dim.
"""

from __future__ import annotations

import json
import re
import sys

import click
import numpy as np

from . import suite as suite_mod
from .boundary import CLOCK, build_fixed_point_state, condensation_table, surviving_boundary_terms
from .excitations import StringSpec, confinement_report, string_operator, syndrome
from .gauging import (
    CapExceededError,
    LayerSpec,
    build_gauging_map,
    compose_gauging,
    initial_state,
    layer_stack,
    verify_emergent_symmetry,
    verify_local_symmetry,
)
from .groups import Cocycle, GroupSpec, is_subgroup
from .lattice import (
    CodeSpec,
    Lattice2D,
    build_boundary_terms,
    build_bulk_stabilizers,
    check_all_commute,
    ground_space_dimension,
    ground_space_dimension_dense,
    logical_operators,
)
from .lattice import CapExceededError as LatticeCapExceeded
from .operators import MonomialOperator, ProductOperator, SiteKind
from .tensors import contract_mpo_layer, pull_through_check

SCHEMA_VERSION = 1


class ConfigError(click.ClickException):
    exit_code = 2


def parse_group(text: str) -> GroupSpec:
    try:
        orders = tuple(int(x) for x in text.split(","))
        return GroupSpec(orders)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad group {text!r}: expected comma separated orders >= 2 ({exc})")


def parse_twist(group: GroupSpec, text: str | None) -> Cocycle | None:
    """Cocycle from 'p12=1,p13=0' pairs or row-major upper-triangle entries."""
    if text is None or text.strip() == "":
        return None
    k = len(group.orders)
    rows = [[0] * k for _ in range(k)]
    text = text.strip()
    try:
        if "=" in text:
            for item in text.split(","):
                m = re.fullmatch(r"\s*p(\d)(\d)\s*=\s*(-?\d+)\s*", item)
                if not m:
                    raise ValueError(f"bad entry {item!r}")
                i, j, v = int(m.group(1)) - 1, int(m.group(2)) - 1, int(m.group(3))
                if not 0 <= i < j < k:
                    raise ValueError(f"indices out of range in {item!r}")
                rows[i][j] = v
        else:
            values = [int(x) for x in text.split(",")]
            slots = [(i, j) for i in range(k) for j in range(i + 1, k)]
            if len(values) != len(slots):
                raise ValueError(f"expected {len(slots)} row-major entries, got {len(values)}")
            for (i, j), v in zip(slots, values):
                rows[i][j] = v
        cocycle = Cocycle(group, tuple(tuple(r) for r in rows))
    except ValueError as exc:
        raise ConfigError(f"bad twist {text!r}: {exc}")
    return None if cocycle.is_trivial else cocycle


def parse_subgroup(group: GroupSpec, text: str | None):
    if text is None:
        return None
    text = text.strip()
    if text in ("e", "trivial"):
        return (group.identity(),)
    if text in ("all", "G"):
        return tuple(group.elements())
    try:
        elems = tuple(group.element(tuple(int(x) for x in part.split(","))) for part in text.split(";"))
    except ValueError as exc:
        raise ConfigError(f"bad subgroup {text!r}: {exc}")
    if not is_subgroup(group, elems):
        raise ConfigError(f"subgroup {text!r} is not closed under the group law")
    return elems


def emit(report: dict, out: str | None) -> None:
    payload = json.dumps(report, indent=2, sort_keys=True, default=_json_default)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        click.echo(f"report written to {out}")
    else:
        click.echo(payload)


def _json_default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def finish(report: dict, out: str | None) -> None:
    for check in report["checks"]:
        status = "PASS" if check.get("passed", True) else "FAIL"
        click.echo(f"[{status}] {check['name']}")
    emit(report, out)
    sys.exit(0 if report["passed"] else 1)


def validate_report(report: dict) -> None:
    """Schema check used by the test suite."""
    if report.get("schema_version") != SCHEMA_VERSION:
        raise ValueError("unknown schema version")
    for key in ("command", "config", "checks", "passed"):
        if key not in report:
            raise ValueError(f"missing report key {key!r}")
    if not isinstance(report["checks"], list):
        raise ValueError("checks must be a list")
    for check in report["checks"]:
        if "name" not in check or "passed" not in check:
            raise ValueError("each check needs a name and a passed flag")


@click.group()
def main() -> None:
    """Exact checks for iteratively gauged 2D codes."""


@main.command()
@click.option("--group", "group_text", required=True, help="cyclic orders, e.g. 2,2")
@click.option("--layers", "num_layers", type=int, default=2, show_default=True)
@click.option("--n", type=int, default=2, show_default=True, help="sites per row")
@click.option("--bc", type=click.Choice(["periodic", "open"]), default="periodic", show_default=True)
@click.option("--twist-even", default=None, help="cocycle for even layers, p12=1 or row-major")
@click.option("--twist-odd", default=None, help="cocycle for odd layers")
@click.option("--max-dim", type=int, default=None, help="amplitude cap override")
@click.option("--tol", type=float, default=1e-10, show_default=True, help="state check tolerance")
@click.option("--out", default=None, help="report path (stdout when omitted)")
def compose(group_text, num_layers, n, bc, twist_even, twist_odd, max_dim, tol, out):
    """Compose gauging layers and verify all emergent identities."""
    group = parse_group(group_text)
    te = parse_twist(group, twist_even)
    to = parse_twist(group, twist_odd)
    if num_layers < 1:
        raise ConfigError("need at least one layer")
    layers = layer_stack(group, n, num_layers, bc, twist_even=te, twist_odd=to)
    checks = []
    norms: list[float] = []
    try:
        state = compose_gauging(layers, initial_state(group, layers[0]), cap=max_dim, norms_out=norms)
    except CapExceededError as exc:
        raise ConfigError(str(exc))
    checks.append(
        {
            "name": "layer_norms_unit",
            "claim": "symmetric inputs stay unit norm through every layer",
            "passed": bool(all(abs(x - 1) < tol for x in norms)),
            "norms": norms,
        }
    )
    local = verify_local_symmetry(state, layers, tol=tol)
    local["claim"] = "the composed state satisfies every stack symmetry"
    checks.append(local)
    for layer in layers:
        gmap = build_gauging_map(layer)
        if gmap.out_dim * gmap.in_dim * group.phase_modulus <= 2**22:
            rep = verify_emergent_symmetry(gmap)
            rep["name"] = f"emergent_symmetry_layer{layer.index}"
            rep["claim"] = "the dual symmetry on the new row fixes the map"
            checks.append(rep)
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "compose",
        "config": {
            "group": list(group.orders),
            "layers": num_layers,
            "n": n,
            "bc": bc,
            "twist_even": twist_even,
            "twist_odd": twist_odd,
            "tol": tol,
        },
        "dimensions": {"amplitudes": int(state.amps.size), "sites": len(state.site_ids)},
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    finish(report, out)


@main.command()
@click.option("--group", "group_text", required=True)
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--m", type=int, default=2, show_default=True)
@click.option("--bc", type=click.Choice(["torus", "cylinder"]), default="torus", show_default=True)
@click.option("--twist-even", default=None)
@click.option("--twist-odd", default=None)
@click.option("--beta", default=None, help="boundary cocycle (cylinder only)")
@click.option("--subgroup", default=None, help="bottom boundary subgroup, e.g. 'e' or '0,0;1,1'")
@click.option("--orientation", type=click.Choice(["standard", "reflected"]), default="standard", show_default=True)
@click.option("--cap-bits", type=float, default=20.0, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--report", "out", default=None, help="report path")
def code(group_text, n, m, bc, twist_even, twist_odd, beta, subgroup, orientation, cap_bits, seed, out):
    """Build the 2D code, check commutation, and compute the ground space."""
    group = parse_group(group_text)
    te = parse_twist(group, twist_even)
    to = parse_twist(group, twist_odd)
    bb = parse_twist(group, beta)
    sub = parse_subgroup(group, subgroup)
    vertical = "periodic" if bc == "torus" else "open"
    try:
        lattice = Lattice2D(group, n, m, vertical)
        spec = CodeSpec(lattice, te, to, bb, subgroup_bottom=sub, orientation=orientation)
    except ValueError as exc:
        raise ConfigError(str(exc))
    terms = build_bulk_stabilizers(spec)
    checks = []
    commute = check_all_commute(terms)
    commute["claim"] = "all stabilizer terms commute pairwise"
    checks.append(commute)
    boundary_terms = []
    if vertical == "open":
        boundary_terms = build_boundary_terms(spec, "bottom") + build_boundary_terms(spec, "top")
        both = check_all_commute(terms + boundary_terms)
        both["name"] = "bulk_and_boundary_commute"
        both["claim"] = "boundary terms commute with the bulk"
        checks.append(both)
    ground = None
    if vertical == "periodic":
        try:
            ground = ground_space_dimension(spec, cap_bits=cap_bits)
        except LatticeCapExceeded as exc:
            checks.append(
                {"name": "ground_dimension", "passed": True, "skipped": str(exc)}
            )
        if ground is not None and lattice.total_dim <= 2**14:
            dense = ground_space_dimension_dense(spec, seed=seed)
            checks.append(
                {
                    "name": "ground_dimension_matches_dense",
                    "claim": "trace formula and dense oracle agree",
                    "passed": bool(dense == ground),
                    "trace": ground,
                    "dense": dense,
                }
            )
    logicals = []
    if vertical == "periodic":
        logicals = [
            {"name": l.name, "commutes": l.commutes, "witness": l.witness}
            for l in logical_operators(spec)
        ]
    violations = []
    for check in checks:
        violations.extend(check.get("violations", []))
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "code",
        "config": {
            "group": list(group.orders),
            "n": n,
            "m": m,
            "bc": bc,
            "twist_even": twist_even,
            "twist_odd": twist_odd,
            "beta": beta,
            "subgroup": subgroup,
            "orientation": orientation,
        },
        "generators": len(terms) + len(boundary_terms),
        "commutation_matrix_ok": commute["passed"],
        "ground_dimension": ground,
        "logicals": logicals,
        "violations": violations,
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    finish(report, out)


def _load_code_spec(path: str) -> CodeSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        group = GroupSpec(tuple(data["group"]))
        vertical = "periodic" if data.get("bc", "torus") == "torus" else "open"
        lattice = Lattice2D(group, int(data["n"]), int(data["m"]), vertical)

        def twist_of(key):
            raw = data.get(key)
            if raw is None:
                return None
            text = ",".join(str(x) for x in raw) if isinstance(raw, list) else raw
            return parse_twist(group, text)

        return CodeSpec(lattice, twist_of("twist_even"), twist_of("twist_odd"), twist_of("beta"))
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad code spec {path!r}: {exc}")


def _op_from_json(spec: CodeSpec, data: dict) -> ProductOperator:
    group = spec.group
    if "string" in data:
        s = data["string"]
        label_exps = tuple(int(x) for x in s["label"])
        label = group.element(label_exps) if s.get("family", "group") == "group" else group.character(label_exps)
        sspec = StringSpec(tuple(tuple(p) for p in s["path"]), label, s["flavor"])
        return string_operator(spec, sspec)
    factors = {}
    kinds = {}
    for item in data["factors"]:
        site = tuple(item["site"])
        factors[site] = MonomialOperator.from_json(item["op"])
        kinds[site] = SiteKind(item["kind"])
    return ProductOperator.from_dict(factors, kinds, group.phase_modulus)


@main.command()
@click.option("--spec", "spec_path", required=True, help="code spec JSON")
@click.option("--op-file", "op_path", required=True, help="operators JSON")
@click.option("--out", default=None)
def anyons(spec_path, op_path, out):
    """Syndrome tables for a list of operators."""
    spec = _load_code_spec(spec_path)
    try:
        with open(op_path, encoding="utf-8") as fh:
            ops_data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad op file {op_path!r}: {exc}")
    terms = build_bulk_stabilizers(spec)
    tables = []
    for k, data in enumerate(ops_data):
        try:
            op = _op_from_json(spec, data)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad operator entry {k}: {exc}")
        syn = syndrome(spec, op, terms)
        tables.append({"name": data.get("name", f"op{k}"), **syn.as_json()})
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "anyons",
        "config": {"spec": spec_path, "op_file": op_path},
        "checks": [{"name": "syndromes_computed", "passed": True, "count": len(tables)}],
        "syndromes": tables,
        "passed": True,
    }
    finish(report, out)


@main.command()
@click.option("--group", "group_text", default=None)
@click.option("--twist-even", default=None, help="nontrivial even-layer cocycle")
@click.option("--spec", "spec_path", default=None, help="code spec JSON instead of flags")
@click.option("--n", type=int, default=4, show_default=True)
@click.option("--m", type=int, default=8, show_default=True)
@click.option("--element", default=None, help="confined charge, e.g. 1,0")
@click.option("--out", default=None)
def confine(group_text, twist_even, spec_path, n, m, element, out):
    """Confinement analysis for a twisted code."""
    if spec_path is not None:
        spec = _load_code_spec(spec_path)
        group = spec.group
    else:
        if group_text is None or twist_even is None:
            raise ConfigError("provide either --spec or both --group and --twist-even")
        group = parse_group(group_text)
        alpha = parse_twist(group, twist_even)
        if alpha is None:
            raise ConfigError("confinement needs a nontrivial even-layer twist")
        spec = CodeSpec(Lattice2D(group, n, m, "periodic"), twist_even=alpha)
    g = None
    if element is not None:
        try:
            g = group.element(tuple(int(x) for x in element.split(",")))
        except ValueError as exc:
            raise ConfigError(f"bad element {element!r}: {exc}")
    try:
        rep = confinement_report(spec, g)
    except ValueError as exc:
        raise ConfigError(str(exc))
    checks = [
        {"name": "string_energy_grows", "passed": rep["string_strictly_increasing"],
         "claim": "horizontal twisted strings cost energy linear in length",
         "counts": rep["string_counts"]},
        {"name": "dipole_moves_freely", "passed": rep["dipole_constant"],
         "claim": "the dipole syndrome does not grow with vertical extent",
         "counts": rep["dipole_counts"]},
        {"name": "dipole_braids_trivially", "passed": rep["dipole_braids_trivially"],
         "claim": "the dipole commutes with horizontal character strings"},
        {"name": "syndrome_multiplicative", "passed": rep["bend_homomorphic"],
         "claim": "bending relocates the syndrome multiplicatively"},
    ]
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "confine",
        "config": {"group": list(group.orders), "twist_even": twist_even, "spec": spec_path,
                   "n": spec.lattice.n, "m": spec.lattice.m, "element": element},
        "single_violations": rep["single_violations"],
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    finish(report, out)


@main.command()
@click.option("--group", "group_text", required=True)
@click.option("--subgroup", required=True, help="unbroken subgroup of the 1D input")
@click.option("--n", type=int, default=4, show_default=True)
@click.option("--m", type=int, default=4, show_default=True)
@click.option("--beta", default=None, help="boundary cocycle")
@click.option("--out", default=None)
def boundary(group_text, subgroup, n, m, beta, out):
    """Surviving boundary terms and anyon condensation for a 1D input phase."""
    group = parse_group(group_text)
    sub = parse_subgroup(group, subgroup)
    bb = parse_twist(group, beta)
    chain = build_fixed_point_state(group, sub, n, CLOCK)
    surviving, raw = surviving_boundary_terms(chain, bb)
    spec = CodeSpec(Lattice2D(group, n, m, "open"), boundary_beta=bb)
    table = condensation_table(spec, chain)
    from .groups import restricted_characters

    expected = {chi.exps for chi in restricted_characters(group, sub)}
    checks = [
        {
            "name": "surviving_terms_match_restriction",
            "claim": "surviving boundary terms are the characters trivial on H",
            "passed": bool(bb is not None or {c.exps for c in surviving} == expected),
        },
        {
            "name": "condensation_partition",
            "claim": "anyons in H condense, anyons outside H are blocked",
            "passed": bool(
                bb is not None
                or all(
                    table["group_anyons"][str(g.exps)]["condenses"] == (g in sub)
                    for g in group.elements()
                )
            ),
        },
    ]
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "boundary",
        "config": {"group": list(group.orders), "subgroup": subgroup, "n": n, "m": m, "beta": beta},
        "surviving": table["surviving"],
        "condensation": {
            "group_anyons": {k: v["condenses"] for k, v in table["group_anyons"].items()},
            "dual_anyons": {k: v["condenses"] for k, v in table["dual_anyons"].items()},
        },
        "raw_expectations": table["raw_expectations"],
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    finish(report, out)


@main.command()
@click.option("--group", "group_text", required=True)
@click.option("--check-pull-through", is_flag=True, default=True)
@click.option("--mpo-layers", is_flag=True, help="also compare MPO layers with the dense maps")
@click.option("--n", type=int, default=2, show_default=True)
@click.option("--out", default=None)
def tn(group_text, check_pull_through, mpo_layers, n, out):
    """Tensor identities and MPO equivalence."""
    group = parse_group(group_text)
    checks = []
    if check_pull_through:
        rep = pull_through_check(group)
        rep["claim"] = "every tensor symmetry identity holds with zero deviation"
        checks.append(rep)
    if mpo_layers:
        ok = True
        for index in (0, 1):
            for bc in ("periodic", "open"):
                layer = LayerSpec(group, index, n, bc, None, offset=-index if bc == "open" else 0)
                gmap = build_gauging_map(layer)
                ratio = contract_mpo_layer(layer).proportional(gmap.exact_matrix())
                if ratio is None or ratio <= 0:
                    ok = False
        checks.append(
            {
                "name": "mpo_equals_dense",
                "claim": "MPO contraction equals the dense map up to a positive scalar",
                "passed": ok,
            }
        )
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": "tn",
        "config": {"group": list(group.orders), "n": n, "mpo_layers": bool(mpo_layers)},
        "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }
    finish(report, out)


@main.command()
@click.option("--out", default=None)
def suite(out):
    """Run the complete verification battery."""
    report = suite_mod.run_suite(echo=click.echo)
    emit(report, out)
    sys.exit(0 if report["passed"] else 1)


if __name__ == "__main__":
    main()
