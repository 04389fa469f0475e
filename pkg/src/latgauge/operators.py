"""Exact monomial-operator algebra on group-labelled local spaces.

Two kinds of local space occur, both of dimension |G|:

  EDGE_GROUP   basis |h> labelled by group elements h,
  VERTEX_DUAL  basis |chi> labelled by characters chi.

A MonomialOperator is a permutation of the basis combined with a phase per
basis state, M|i> = w**phase[i] |perm[i]|, so products, inverses and
commutators stay exact: phases are integers mod L.  On EDGE_GROUP sites
the generalized clock and shift act as

  shift_x(g)   |h>   -> |g h>
  clock_z(chi) |h>   -> chi(h) |h>

and on VERTEX_DUAL sites with the roles of labels exchanged

  shift_x_dual(chi) |k>  -> |chi k>
  clock_z_dual(g)   |k>  -> k(g) |k>.

The projective variants twist the shifts by a 2-cocycle:

  projective_x(alpha, g)       |h> -> alpha(g, h) |g h>
  projective_x_tilde(alpha, g) |h> -> conj(alpha)(h g^-1, g) |h g^-1>

which form commuting left and right projective regular representations.
ProductOperator tensors site-local monomials over named sites and is the
workhorse for stabilizers, strings and logicals.  StateVector holds dense
complex amplitudes; operator-level checks are exact, state-level checks
use floating point with the tolerances fixed by the callers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .groups import (
    Cocycle,
    DualCharacter,
    GroupElement,
    GroupMismatchError,
    GroupSpec,
    PhaseExponent,
)


class SiteKind(enum.Enum):
    EDGE_GROUP = "edge_group"
    VERTEX_DUAL = "vertex_dual"


@dataclass(frozen=True)
class MonomialOperator:
    dim: int
    perm: tuple[int, ...]
    phase: tuple[int, ...]
    modulus: int

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(range(self.dim)):
            raise ValueError("perm must be a bijection on basis indices")
        if len(self.phase) != self.dim:
            raise ValueError("one phase exponent per basis state required")
        object.__setattr__(self, "phase", tuple(p % self.modulus for p in self.phase))

    @classmethod
    def identity(cls, dim: int, modulus: int) -> "MonomialOperator":
        return cls(dim, tuple(range(dim)), (0,) * dim, modulus)

    def multiply(self, other: "MonomialOperator") -> "MonomialOperator":
        """Exact composition self . other (self applied second)."""
        if self.dim != other.dim or self.modulus != other.modulus:
            raise ValueError("operator dimensions or moduli differ")
        perm = tuple(self.perm[other.perm[i]] for i in range(self.dim))
        phase = tuple(other.phase[i] + self.phase[other.perm[i]] for i in range(self.dim))
        return MonomialOperator(self.dim, perm, phase, self.modulus)

    __matmul__ = multiply

    def adjoint(self) -> "MonomialOperator":
        inv = [0] * self.dim
        for i, p in enumerate(self.perm):
            inv[p] = i
        phase = tuple(-self.phase[inv[j]] for j in range(self.dim))
        return MonomialOperator(self.dim, tuple(inv), phase, self.modulus)

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.dim)) and all(p == 0 for p in self.phase)

    def scalar_part(self) -> PhaseExponent | None:
        """The phase if this operator is a scalar multiple of the identity."""
        if self.perm != tuple(range(self.dim)):
            return None
        if any(p != self.phase[0] for p in self.phase):
            return None
        return PhaseExponent(self.phase[0], self.modulus)

    def trace_counts(self) -> np.ndarray:
        """Exact trace as a count vector over phase exponents."""
        counts = np.zeros(self.modulus, dtype=np.int64)
        for i, p in enumerate(self.perm):
            if p == i:
                counts[self.phase[i]] += 1
        return counts

    def to_dense(self) -> np.ndarray:
        mat = np.zeros((self.dim, self.dim), dtype=complex)
        w = np.exp(2j * np.pi / self.modulus)
        for i in range(self.dim):
            mat[self.perm[i], i] = w ** self.phase[i]
        return mat

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "perm": list(self.perm),
            "phase": list(self.phase),
            "modulus": self.modulus,
        }

    @classmethod
    def from_json(cls, data: dict) -> "MonomialOperator":
        return cls(data["dim"], tuple(data["perm"]), tuple(data["phase"]), data["modulus"])


# -- clock / shift constructors -------------------------------------------


def _shift(spec: GroupSpec, exps: tuple[int, ...], phase_fn=None) -> MonomialOperator:
    dim = spec.size
    perm = [0] * dim
    phase = [0] * dim
    for idx in range(dim):
        h = spec.exps_of(idx)
        perm[idx] = spec.index_of(spec.add_exps(exps, h))
        if phase_fn is not None:
            phase[idx] = phase_fn(h)
    return MonomialOperator(dim, tuple(perm), tuple(phase), spec.phase_modulus)


def _clock(spec: GroupSpec, exps: tuple[int, ...]) -> MonomialOperator:
    dim = spec.size
    phase = tuple(spec.pair_exponent(exps, spec.exps_of(i)) for i in range(dim))
    return MonomialOperator(dim, tuple(range(dim)), phase, spec.phase_modulus)


def shift_x(g: GroupElement) -> MonomialOperator:
    return _shift(g.group, g.exps)


def clock_z(chi: DualCharacter) -> MonomialOperator:
    return _clock(chi.group, chi.exps)


def shift_x_dual(chi: DualCharacter) -> MonomialOperator:
    return _shift(chi.group, chi.exps)


def clock_z_dual(g: GroupElement) -> MonomialOperator:
    """Diagonal representation of g on a VERTEX_DUAL site, |k> -> k(g)|k>."""
    return _clock(g.group, g.exps)


def _projective(spec: GroupSpec, alpha: Cocycle, exps: tuple[int, ...]) -> MonomialOperator:
    dim = spec.size
    perm = [0] * dim
    phase = [0] * dim
    for idx in range(dim):
        h = spec.exps_of(idx)
        perm[idx] = spec.index_of(spec.add_exps(exps, h))
        phase[idx] = alpha.exponent(exps, h)
    return MonomialOperator(dim, tuple(perm), tuple(phase), spec.phase_modulus)


def _projective_tilde(spec: GroupSpec, alpha: Cocycle, exps: tuple[int, ...]) -> MonomialOperator:
    dim = spec.size
    neg = spec.neg_exps(exps)
    perm = [0] * dim
    phase = [0] * dim
    for idx in range(dim):
        h = spec.exps_of(idx)
        target = spec.add_exps(h, neg)
        perm[idx] = spec.index_of(target)
        phase[idx] = -alpha.exponent(target, exps) % spec.phase_modulus
    return MonomialOperator(dim, tuple(perm), tuple(phase), spec.phase_modulus)


def projective_x(alpha: Cocycle, g: GroupElement) -> MonomialOperator:
    """Left projective shift, X(g) X(h) = alpha(g, h) X(g h)."""
    if alpha.group != g.group:
        raise GroupMismatchError("cocycle and element from different groups")
    return _projective(g.group, alpha, g.exps)


def projective_x_tilde(alpha: Cocycle, g: GroupElement) -> MonomialOperator:
    """Commuting right projective shift |h> -> conj(alpha)(h g^-1, g)|h g^-1>."""
    if alpha.group != g.group:
        raise GroupMismatchError("cocycle and element from different groups")
    return _projective_tilde(g.group, alpha, g.exps)


def projective_x_dual(beta: Cocycle, chi: DualCharacter) -> MonomialOperator:
    """projective_x with character labels, for VERTEX_DUAL sites."""
    if beta.group != chi.group:
        raise GroupMismatchError("cocycle and character from different groups")
    return _projective(chi.group, beta, chi.exps)


def projective_x_tilde_dual(beta: Cocycle, chi: DualCharacter) -> MonomialOperator:
    if beta.group != chi.group:
        raise GroupMismatchError("cocycle and character from different groups")
    return _projective_tilde(chi.group, beta, chi.exps)


def multiply(a: MonomialOperator, b: MonomialOperator) -> MonomialOperator:
    return a.multiply(b)


# -- products over sites ----------------------------------------------------


@dataclass(frozen=True)
class ProductOperator:
    """Tensor product of site-local monomials, identity elsewhere.

    factors maps a hashable site id to a MonomialOperator; kinds records
    the expected SiteKind per site so state application can reject
    mismatched placements.
    """

    factors: tuple[tuple[object, MonomialOperator], ...]
    kinds: tuple[tuple[object, SiteKind], ...]
    modulus: int

    @classmethod
    def from_dict(
        cls,
        factors: dict,
        kinds: dict,
        modulus: int,
        drop_identity: bool = True,
    ) -> "ProductOperator":
        items = []
        kind_items = []
        for site in factors:
            op = factors[site]
            if drop_identity and op.is_identity:
                continue
            items.append((site, op))
            kind_items.append((site, kinds[site]))
        items.sort(key=lambda kv: repr(kv[0]))
        kind_items.sort(key=lambda kv: repr(kv[0]))
        return cls(tuple(items), tuple(kind_items), modulus)

    @classmethod
    def identity_op(cls, modulus: int) -> "ProductOperator":
        return cls((), (), modulus)

    def factor_map(self) -> dict:
        return dict(self.factors)

    def kind_map(self) -> dict:
        return dict(self.kinds)

    @property
    def support(self) -> tuple:
        return tuple(site for site, _ in self.factors)

    def multiply(self, other: "ProductOperator") -> "ProductOperator":
        """self . other with sitewise exact composition."""
        if self.modulus != other.modulus:
            raise ValueError("phase moduli differ")
        fac = dict(other.factors)
        kinds = dict(other.kinds)
        for site, op in self.factors:
            if site in fac:
                fac[site] = op.multiply(fac[site])
            else:
                fac[site] = op
        kinds.update(dict(self.kinds))
        return ProductOperator.from_dict(fac, kinds, self.modulus)

    __matmul__ = multiply

    def adjoint(self) -> "ProductOperator":
        fac = {site: op.adjoint() for site, op in self.factors}
        return ProductOperator.from_dict(fac, self.kind_map(), self.modulus)

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "factors": [
                {"site": list(site) if isinstance(site, tuple) else site,
                 "kind": kind.value,
                 "op": op.to_json()}
                for (site, op), (_, kind) in zip(self.factors, self.kinds)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ProductOperator":
        factors = {}
        kinds = {}
        for item in data["factors"]:
            site = tuple(item["site"]) if isinstance(item["site"], list) else item["site"]
            factors[site] = MonomialOperator.from_json(item["op"])
            kinds[site] = SiteKind(item["kind"])
        return cls.from_dict(factors, kinds, data["modulus"])


def commutation_phase(a: ProductOperator, b: ProductOperator) -> PhaseExponent | None:
    """Scalar c with a.b = c b.a, or None when the commutator is not scalar.

    Computed sitewise from a b a^-1 b^-1; the result is a global phase
    exactly when every shared site contributes a scalar.
    """
    if a.modulus != b.modulus:
        raise ValueError("phase moduli differ")
    fa, fb = dict(a.factors), dict(b.factors)
    total = PhaseExponent.one(a.modulus)
    for site in fa:
        if site not in fb:
            continue
        m = fa[site].multiply(fb[site]).multiply(fa[site].adjoint()).multiply(fb[site].adjoint())
        scalar = m.scalar_part()
        if scalar is None:
            return None
        total = total * scalar
    return total


# -- dense states ------------------------------------------------------------


@dataclass
class StateVector:
    """Dense amplitudes over an ordered list of sites (site_id, kind, dim).

    The flat index is row major in site order: the first site is the most
    significant digit of the mixed-radix configuration label.
    """

    site_ids: tuple
    kinds: tuple
    dims: tuple
    amps: np.ndarray

    def __post_init__(self) -> None:
        expected = int(np.prod(self.dims)) if self.dims else 1
        if self.amps.shape != (expected,):
            raise ValueError("amplitude array does not match site dimensions")

    @classmethod
    def product_state(cls, sites, locals_) -> "StateVector":
        """Tensor product of per-site local vectors.

        sites is a sequence of (site_id, kind); locals_ a matching sequence
        of 1d complex arrays.
        """
        ids = tuple(s for s, _ in sites)
        kinds = tuple(k for _, k in sites)
        dims = tuple(len(v) for v in locals_)
        amps = np.ones(1, dtype=complex)
        for v in locals_:
            amps = np.kron(amps, np.asarray(v, dtype=complex))
        return cls(ids, kinds, dims, amps)

    @classmethod
    def basis_state(cls, sites, dims, index_tuple) -> "StateVector":
        ids = tuple(s for s, _ in sites)
        kinds = tuple(k for _, k in sites)
        amps = np.zeros(int(np.prod(dims)), dtype=complex)
        flat = 0
        for i, d in zip(index_tuple, dims):
            flat = flat * d + i
        amps[flat] = 1.0
        return cls(ids, kinds, tuple(dims), amps)

    def axis_of(self, site_id) -> int:
        return self.site_ids.index(site_id)

    def copy(self) -> "StateVector":
        return StateVector(self.site_ids, self.kinds, self.dims, self.amps.copy())

    def apply(self, op: ProductOperator) -> "StateVector":
        """Apply a product operator; permutation plus phase per site."""
        out = self.amps
        kinds = dict(op.kinds)
        w = np.exp(2j * np.pi / op.modulus) if op.factors else 1.0
        for site, mono in op.factors:
            axis = self.axis_of(site)
            if kinds.get(site) is not None and kinds[site] != self.kinds[axis]:
                raise ValueError(f"site kind mismatch at {site!r}")
            d = self.dims[axis]
            if mono.dim != d:
                raise ValueError(f"operator dimension mismatch at {site!r}")
            pre = int(np.prod(self.dims[:axis])) if axis else 1
            post = int(np.prod(self.dims[axis + 1:])) if axis + 1 < len(self.dims) else 1
            cur = out.reshape(pre, d, post)
            nxt = np.empty_like(cur)
            phases = w ** np.array(mono.phase)
            nxt[:, np.array(mono.perm), :] = cur * phases[None, :, None]
            out = nxt.reshape(-1)
        return StateVector(self.site_ids, self.kinds, self.dims, out)

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(
            self.site_ids + other.site_ids,
            self.kinds + other.kinds,
            self.dims + other.dims,
            np.kron(self.amps, other.amps),
        )

    def reordered(self, new_site_order) -> "StateVector":
        """Same state with sites permuted into the given id order."""
        order = [self.axis_of(s) for s in new_site_order]
        if sorted(order) != list(range(len(self.site_ids))):
            raise ValueError("new order must mention every site exactly once")
        amps = self.amps.reshape(self.dims).transpose(order).reshape(-1)
        return StateVector(
            tuple(self.site_ids[a] for a in order),
            tuple(self.kinds[a] for a in order),
            tuple(self.dims[a] for a in order),
            np.ascontiguousarray(amps),
        )

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("cannot normalize the zero vector")
        return StateVector(self.site_ids, self.kinds, self.dims, self.amps / n)

    def inner(self, other: "StateVector") -> complex:
        if self.site_ids != other.site_ids:
            raise ValueError("states live on different site lists")
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) ** 2 / (self.norm() ** 2 * other.norm() ** 2)

    def entanglement_entropy(self, cut: int) -> float:
        """Von Neumann entropy (natural log) across sites[:cut] | sites[cut:]."""
        left = int(np.prod(self.dims[:cut])) if cut else 1
        right = int(np.prod(self.dims[cut:])) if cut < len(self.dims) else 1
        mat = self.amps.reshape(left, right)
        sv = np.linalg.svd(mat, compute_uv=False)
        p = sv ** 2
        p = p[p > 1e-15]
        p = p / p.sum()
        return float(-(p * np.log(p)).sum())


# -- fusion of diagonal flux operators (general finite groups) --------------


@dataclass(frozen=True)
class FiniteGroupTable:
    """A finite group given by its multiplication table.

    mult[i][j] is the index of g_i g_j.  The identity index is located by
    scanning for a left and right unit; associativity is assumed.
    """

    mult: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.mult)

    @property
    def identity_index(self) -> int:
        n = self.size
        for e in range(n):
            if all(self.mult[e][j] == j and self.mult[j][e] == j for j in range(n)):
                return e
        raise ValueError("multiplication table has no identity")

    def inverse_index(self, i: int) -> int:
        e = self.identity_index
        for j in range(self.size):
            if self.mult[i][j] == e:
                return j
        raise ValueError("element has no inverse; not a group table")

    def is_class_function(self, values) -> bool:
        n = self.size
        for g in range(n):
            ginv = self.inverse_index(g)
            for h in range(n):
                conj = self.mult[self.mult[g][h]][ginv]
                if not np.isclose(values[conj], values[h]):
                    return False
        return True


@dataclass
class DiagonalOperator:
    """Diagonal operator on a product of identical group-labelled sites."""

    diag: np.ndarray

    def multiply(self, other: "DiagonalOperator") -> "DiagonalOperator":
        return DiagonalOperator(self.diag * other.diag)

    __matmul__ = multiply

    def close_to(self, other: "DiagonalOperator", tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.diag - other.diag)) <= tol)


def irrep_flux_operator(table: FiniteGroupTable, character, n_sites: int) -> DiagonalOperator:
    """Diagonal operator weighting each configuration by chi(g_1 ... g_n).

    character is a length |G| vector of character values per element and
    must be a class function.  For one-dimensional characters the result
    factorizes into a product of site-local clocks; in general it does not.
    """
    values = np.asarray(character, dtype=complex)
    if values.shape != (table.size,):
        raise ValueError("character must assign one value per group element")
    if not table.is_class_function(values):
        raise ValueError("character values are not a class function")
    n = table.size
    prod_index = np.zeros(1, dtype=np.int64) + table.identity_index
    for _ in range(n_sites):
        # prod_index[c] holds the index of the ordered product over the
        # configuration c; extend one site at a time.
        prod_index = np.array(
            [table.mult[p][g] for p in prod_index for g in range(n)], dtype=np.int64
        )
    return DiagonalOperator(values[prod_index])


def fusion_coefficients(characters) -> np.ndarray:
    """Multiplicities N[s, r, t] from character orthogonality.

    characters is a matrix (n_irreps, |G|) of per-element values;
    N[s, r, t] = (1/|G|) sum_g chi_s(g) chi_r(g) conj(chi_t(g)).
    """
    chars = np.asarray(characters, dtype=complex)
    size = chars.shape[1]
    n = np.einsum("sg,rg,tg->srt", chars, chars, chars.conj()) / size
    rounded = np.rint(n.real).astype(int)
    if not np.allclose(n, rounded, atol=1e-9):
        raise ArithmeticError("fusion multiplicities are not integers")
    return rounded
