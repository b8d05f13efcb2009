"""Orthosymplectic superalgebras in the defining representation.

The invariant form ``G`` is an even, body-only supermatrix.  For the
``so_first`` variant its even block is the symmetric form eta and its odd block
the symplectic form Omega; ``sp_first`` swaps the roles.  Generators are

    T_{X1 X2} = e_{X2} e_{X1}^T G + s(X1, X2) e_{X1} e_{X2}^T G

with ``s`` the graded symmetrisation sign, so ``T_{X2 X1} = s T_{X1 X2}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .grassmann import AlgebraContext, Parity, Supernumber
from .supermatrix import (
    Supermatrix,
    SupermatrixError,
    berezinian,
    direct_sum,
    scalar_left_mul,
)

EPSILON = np.array([[0, 1], [-1, 0]])
LAYOUTS = ("identity", "split", "paper54")
GROUP_TOL = 1e-9


class OspError(ValueError):
    pass


@dataclass(frozen=True)
class FormConvention:
    p: int
    q: int
    variant: str = "so_first"
    eta_layout: str = "identity"

    def __post_init__(self):
        if self.variant not in ("so_first", "sp_first"):
            raise OspError(f"unknown variant {self.variant!r}")
        if self.eta_layout not in LAYOUTS:
            raise OspError(f"unknown eta layout {self.eta_layout!r}")
        if self.p < 0 or self.q < 0:
            raise OspError("p and q must be nonnegative")
        if self.eta_layout == "paper54" and self.p % 2:
            raise OspError("paper54 layout needs an even p (pairs of epsilon blocks)")


def eta_matrix(p: int, layout: str) -> np.ndarray:
    """Symmetric (2p+1)x(2p+1) form with eta^2 = 1."""
    n = 2 * p + 1
    if layout == "identity":
        return np.eye(n, dtype=int)
    eta = np.zeros((n, n), dtype=int)
    eta[n - 1, n - 1] = 1
    if layout == "split":
        eta[:p, p:2 * p] = np.eye(p, dtype=int)
        eta[p:2 * p, :p] = np.eye(p, dtype=int)
        return eta
    # paper54: [[0, e, 0], [-e, 0, 0], [0, 0, 1]] with e the epsilon blocks
    h = p // 2
    e = np.kron(np.eye(h, dtype=int), EPSILON) if h else np.zeros((0, 0), dtype=int)
    eta[:p, p:2 * p] = e
    eta[p:2 * p, :p] = -e
    return eta


def omega_matrix(q: int) -> np.ndarray:
    """Standard symplectic form [[0, 1], [-1, 0]] in q x q blocks."""
    om = np.zeros((2 * q, 2 * q), dtype=int)
    om[:q, q:] = np.eye(q, dtype=int)
    om[q:, :q] = -np.eye(q, dtype=int)
    return om


def build_forms(conv: FormConvention, ctx: AlgebraContext | None = None):
    """Return (eta, Omega, G) as body-only supermatrices."""
    ctx = ctx or AlgebraContext(0)
    eta = eta_matrix(conv.p, conv.eta_layout)
    om = omega_matrix(conv.q)
    if conv.variant == "so_first":
        eta_m = Supermatrix.from_body(ctx, (len(eta), 0), (len(eta), 0), eta)
        om_m = Supermatrix.from_body(ctx, (0, len(om)), (0, len(om)), om)
        return eta_m, om_m, direct_sum(eta_m, om_m)
    om_m = Supermatrix.from_body(ctx, (len(om), 0), (len(om), 0), om)
    eta_m = Supermatrix.from_body(ctx, (0, len(eta)), (0, len(eta)), eta)
    return eta_m, om_m, direct_sum(om_m, eta_m)


def symmetrisation_sign(x1: int, x2: int, variant: str) -> int:
    """Sign s with T_{X2 X1} = s T_{X1 X2} for index parities x1, x2."""
    s = -1 if (x1 + 1) * (x2 + 1) % 2 else 1
    # with the symplectic form on the even block every class flips sign
    return s if variant == "so_first" else -s


def _form_variant(g: np.ndarray, parity: np.ndarray) -> str:
    ev = parity == 0
    block = g[np.ix_(ev, ev)] if ev.any() else g[np.ix_(~ev, ~ev)]
    symmetric = np.array_equal(block, block.T)
    if ev.any():
        return "so_first" if symmetric else "sp_first"
    return "sp_first" if symmetric else "so_first"


@dataclass
class OspBasis:
    """Generator basis of osp(G); ``generators`` keyed by canonical (X1, X2), X1 <= X2."""

    G: Supermatrix
    variant: str
    convention: FormConvention | None = None
    generators: dict = field(default_factory=dict)

    @property
    def parity(self) -> np.ndarray:
        return self.G.row_parity

    @property
    def dim(self) -> int:
        return len(self.parity)

    def pair_kind(self, x1: int, x2: int) -> str:
        a, b = self.parity[x1], self.parity[x2]
        if a != b:
            return "odd"
        symmetric_block = (a == 0) == (self.variant == "so_first")
        return "orthogonal" if symmetric_block else "symplectic"

    def counts(self) -> dict:
        out = {"orthogonal": 0, "symplectic": 0, "odd": 0}
        for key in self.generators:
            out[self.pair_kind(*key)] += 1
        return out

    def sign(self, x1: int, x2: int) -> int:
        return symmetrisation_sign(int(self.parity[x1]), int(self.parity[x2]), self.variant)

    def generator(self, x1: int, x2: int) -> Supermatrix:
        """T_{X1 X2} for any ordered pair, using the graded symmetry (zero when it vanishes)."""
        key = (min(x1, x2), max(x1, x2))
        t = self.generators.get(key)
        if t is None:
            return Supermatrix.zeros(self.G.ctx, self.parity)
        return t if x1 <= x2 else t * self.sign(x2, x1)

    def grade(self, x1: int, x2: int) -> int:
        return int(self.parity[x1] + self.parity[x2]) % 2

    def with_context(self, ctx: AlgebraContext) -> "OspBasis":
        return OspBasis(self.G.with_context(ctx), self.variant, self.convention,
                        {k: t.with_context(ctx) for k, t in self.generators.items()})


def generator_matrix(g: np.ndarray, x1: int, x2: int, s: int) -> np.ndarray:
    n = g.shape[0]
    t = np.zeros((n, n), dtype=g.dtype)
    t[x2, :] += g[x1, :]
    t[x1, :] += s * g[x2, :]
    return t


def basis_from_form(G: Supermatrix, convention: FormConvention | None = None) -> OspBasis:
    """Generators for an arbitrary body-only invariant form (any index order)."""
    if not np.array_equal(G.row_parity, G.col_parity):
        raise OspError("form must be square with matching gradings")
    if np.any(G.soul().data):
        raise OspError("form must be body-only")
    g = G.body().real.astype(int)
    if not np.array_equal(g, G.body()):
        raise OspError("form must have integer entries")
    parity = G.row_parity
    variant = convention.variant if convention else _form_variant(g, parity)
    basis = OspBasis(G, variant, convention)
    ctx = G.ctx
    for x1, x2 in itertools.combinations_with_replacement(range(len(parity)), 2):
        s = symmetrisation_sign(int(parity[x1]), int(parity[x2]), variant)
        t = generator_matrix(g, x1, x2, s)
        if not t.any():
            continue
        basis.generators[(x1, x2)] = Supermatrix.from_body(ctx, parity, parity, t)
    return basis


def build_generators(conv: FormConvention, ctx: AlgebraContext | None = None) -> OspBasis:
    _, _, G = build_forms(conv, ctx)
    return basis_from_form(G, conv)


# -- superbrackets --------------------------------------------------------------


def generator_bracket(basis: OspBasis, k1, k2) -> Supermatrix:
    """[[T_k1, T_k2]] with the grade read off the index pairs."""
    t1, t2 = basis.generator(*k1), basis.generator(*k2)
    both_odd = basis.grade(*k1) and basis.grade(*k2)
    return t1 @ t2 - (t2 @ t1) * (-1 if both_odd else 1)


def structure_rhs(basis: OspBasis, k1, k2) -> Supermatrix:
    """4 G_{[[X1 [[X3}} T_{X2]] X4]] written out as four contractions.

    With T_{ab} = E_{ba} + s_ab E_{ab} and E_{ba} E_{dc} = G_{ad} E_{bc} one gets
    G_14 T_32 + s_34 G_13 T_42 + s_12 G_24 T_31 + s_12 s_34 G_23 T_41.
    """
    g = basis.G.body().real
    x1, x2 = k1
    x3, x4 = k2
    s12, s34 = basis.sign(x1, x2), basis.sign(x3, x4)
    total = Supermatrix.zeros(basis.G.ctx, basis.parity)
    for coeff, (a, b) in (
        (g[x1, x4], (x3, x2)),
        (s34 * g[x1, x3], (x4, x2)),
        (s12 * g[x2, x4], (x3, x1)),
        (s12 * s34 * g[x2, x3], (x4, x1)),
    ):
        if coeff:
            total = total + basis.generator(a, b) * coeff
    return total


def check_closure(basis: OspBasis) -> list:
    """Pairs (k1, k2) where the bracket differs from the structure-constant formula."""
    bad = []
    keys = sorted(basis.generators)
    for k1, k2 in itertools.combinations_with_replacement(keys, 2):
        if not generator_bracket(basis, k1, k2) == structure_rhs(basis, k1, k2):
            bad.append((k1, k2))
    return bad


def check_jacobi(basis: OspBasis) -> list:
    """Triples violating the graded Jacobi identity (exact comparison)."""
    bad = []
    keys = sorted(basis.generators)
    grades = {k: basis.grade(*k) for k in keys}

    def br(a, ga, b, gb):
        return a @ b - (b @ a) * (-1 if ga and gb else 1)

    for k1, k2, k3 in itertools.product(keys, repeat=3):
        a, b, c = (basis.generators[k] for k in (k1, k2, k3))
        ga, gb, gc = grades[k1], grades[k2], grades[k3]
        # [a,[b,c]] = [[a,b],c] + (-1)^{ab} [b,[a,c]]
        lhs = br(a, ga, br(b, gb, c, gc), (gb + gc) % 2)
        rhs1 = br(br(a, ga, b, gb), (ga + gb) % 2, c, gc)
        rhs2 = br(b, gb, br(a, ga, c, gc), (ga + gc) % 2) * (-1 if ga and gb else 1)
        if not lhs == rhs1 + rhs2:
            bad.append((k1, k2, k3))
    return bad


# -- Grassmann envelope and uosp elements ----------------------------------------------


def _coefficient(basis: OspBasis, params: dict, x1: int, x2: int, ctx: AlgebraContext):
    """params extended to all ordered pairs by the generators' graded symmetry."""
    if (x1, x2) in params:
        return params[(x1, x2)]
    if (x2, x1) in params:
        return params[(x2, x1)] * basis.sign(x2, x1)
    return None


def envelope_element(basis: OspBasis, coeffs: dict) -> Supermatrix:
    """X = sum over canonical pairs of xi_{X1X2} T_{X1X2} (left scalar rule)."""
    G = basis.G
    ctx = G.ctx
    total = Supermatrix.zeros(ctx, G.row_parity)
    for key, xi in coeffs.items():
        if not isinstance(xi, Supernumber):
            xi = ctx.scalar(xi)
        if xi.is_zero():
            continue
        want = Parity.ODD if basis.grade(*key) else Parity.EVEN
        if xi.grade() not in (want, Parity.ZERO):
            raise OspError(f"coefficient for {key} must be {want.value}, got {xi.grade().value}")
        total = total + scalar_left_mul(xi, basis.generator(*key))
    return total


def uosp_element(basis: OspBasis, params: dict) -> Supermatrix:
    """Super-anti-Hermitian element built from unconstrained Grassmann parameters.

    ``params`` maps an index pair (X1, X2) of the defining representation to a
    Supernumber (even for same-parity pairs, odd otherwise).  The coefficient of
    T_{X1X2} is xi_{X1X2} + G_{X1X1'} G_{X2X2'} xi#_{X1'X2'}, summed as
    1/2 sum over all ordered pairs.
    """
    G = basis.G
    ctx = G.ctx
    g = G.body().real
    n = basis.dim
    full = {}
    for (x1, x2), xi in params.items():
        if not isinstance(xi, Supernumber):
            xi = ctx.scalar(xi)
        want = Parity.ODD if basis.grade(x1, x2) else Parity.EVEN
        if xi.grade() not in (want, Parity.ZERO):
            raise OspError(f"parameter {(x1, x2)} must be {want.value}, got {xi.grade().value}")
        full[(x1, x2)] = full.get((x1, x2), ctx.zero()) + xi
    nz = [np.flatnonzero(g[i]) for i in range(n)]
    coeffs = {}
    for x1, x2 in basis.generators:
        total = _coefficient(basis, full, x1, x2, ctx)
        total = ctx.zero() if total is None else total
        for y1 in nz[x1]:
            for y2 in nz[x2]:
                c = _coefficient(basis, full, int(y1), int(y2), ctx)
                if c is not None:
                    total = total + c.superstar() * (g[x1, y1] * g[x2, y2])
        if x1 == x2:
            total = total * 0.5
        if not total.is_zero():
            coeffs[(x1, x2)] = total
    return envelope_element(basis, coeffs)


def uosp_real_basis(basis: OspBasis, kinds=("orthogonal", "symplectic")) -> list:
    """Body-only real spanning set of the compact even subalgebra (unit and imaginary parameters); not independent."""
    ctx = basis.G.ctx
    out = []
    for key in sorted(basis.generators):
        if basis.pair_kind(*key) not in kinds:
            continue
        for c in (1.0, 1j):
            x = uosp_element(basis, {key: ctx.scalar(c)})
            if x.max_abs() == 0:
                continue
            out.append(x)
    return out


def random_uosp_element(basis: OspBasis, rng: np.random.Generator, body_scale: float = 1.0,
                        soul_scale: float = 1.0) -> Supermatrix:
    """Random element with bounded bodies and random souls in every parameter."""
    ctx = basis.G.ctx
    params = {}
    par = parity_masks(ctx)
    for key in basis.generators:
        if basis.grade(*key):
            arr = np.zeros(ctx.size, dtype=complex)
            arr[par[1]] = soul_scale * (rng.uniform(-1, 1, par[1].sum()) + 1j * rng.uniform(-1, 1, par[1].sum()))
        else:
            arr = np.zeros(ctx.size, dtype=complex)
            arr[par[0]] = soul_scale * (rng.uniform(-1, 1, par[0].sum()) + 1j * rng.uniform(-1, 1, par[0].sum()))
            arr[0] = body_scale * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        params[key] = Supernumber.from_array(ctx, arr)
    x = uosp_element(basis, params)
    bn = np.abs(x.body()).max()
    if bn > body_scale:
        # keep the body bounded; the soul is rescaled along with it, which keeps X in uosp
        x = x * (body_scale / bn)
    return x


def parity_masks(ctx: AlgebraContext):
    from .grassmann import parity_table
    par = parity_table(ctx.num_pairs)
    return (par == 0), (par == 1)


# -- membership ---------------------------------------------------------------


@dataclass
class MembershipReport:
    residuals: dict
    tolerance: float = GROUP_TOL

    @property
    def passed(self) -> bool:
        return all(v < self.tolerance for v in self.residuals.values())

    def lines(self):
        for name, v in self.residuals.items():
            yield f"{name}\t{v:.3e}\t{'ok' if v < self.tolerance else 'FAIL'}"


def check_group_element(g: Supermatrix, G: Supermatrix, tol: float = GROUP_TOL) -> MembershipReport:
    """Residuals of g^st G g = G, g^dag g = 1 and Ber(g) = 1."""
    G = G.with_context(g.ctx) if G.ctx != g.ctx else G
    eye = Supermatrix.identity(g.ctx, g.row_parity)
    res = {
        "form": (g.st @ G @ g - G).max_abs(),
        "unitary": (g.superadjoint() @ g - eye).max_abs(),
    }
    try:
        res["berezinian"] = (berezinian(g) - 1).max_abs()
    except SupermatrixError:
        res["berezinian"] = float("inf")
    return MembershipReport(res, tol)


def check_algebra_element(x: Supermatrix, G: Supermatrix, tol: float = GROUP_TOL) -> MembershipReport:
    """Residuals of X^st G + G X = 0 and X^dag = -X."""
    G = G.with_context(x.ctx) if G.ctx != x.ctx else G
    return MembershipReport({
        "form": (x.st @ G + G @ x).max_abs(),
        "antihermitian": (x.superadjoint() + x).max_abs(),
    }, tol)


@dataclass
class BodyStructure:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def body_structure(x: Supermatrix, tol: float = 1e-12) -> BodyStructure:
    """Soul-free blocks of a uosp(2p+1|2q) element in a split-Omega basis.

    The body has the form diag(A, [[B, C], [-C*, -B^t]]) with A real antisymmetric,
    B anti-Hermitian and C complex symmetric.
    """
    body = x.body()
    ev = x.row_parity == 0
    od = ~ev
    violations = []
    if np.abs(body[np.ix_(ev, od)]).max(initial=0) > tol or np.abs(body[np.ix_(od, ev)]).max(initial=0) > tol:
        violations.append("odd blocks have nonzero body")
    a = body[np.ix_(ev, ev)]
    d = body[np.ix_(od, od)]
    q = d.shape[0] // 2
    b, c = d[:q, :q], d[:q, q:]
    if np.abs(a.imag).max(initial=0) > tol:
        violations.append("A is not real")
    if np.abs(a + a.T).max(initial=0) > tol:
        violations.append("A is not antisymmetric")
    if np.abs(b + b.conj().T).max(initial=0) > tol:
        violations.append("B is not anti-Hermitian")
    if np.abs(c - c.T).max(initial=0) > tol:
        violations.append("C is not symmetric")
    if np.abs(d[q:, :q] + c.conj()).max(initial=0) > tol:
        violations.append("lower-left block is not -C*")
    if np.abs(d[q:, q:] + b.T).max(initial=0) > tol:
        violations.append("lower-right block is not -B^t")
    return BodyStructure(a, b, c, violations)


# -- action on tensor powers of the defining supermodule ----------------------------


def module_action(basis: OspBasis, key, a: np.ndarray) -> np.ndarray:
    """(T_{X1X2} a)_{X3} from the generator formula, for a coefficient array a[X, mask].

    Row X2 of T_{X1X2} is row X1 of G (plus the symmetrised partner), so
    (T a)_{X3} = delta_{X3 X2} (G a)_{X1} + s delta_{X3 X1} (G a)_{X2}.
    """
    x1, x2 = key
    g = basis.G.body()
    s = basis.sign(x1, x2)
    out = np.zeros_like(a)
    out[x2] += np.tensordot(g[x1], a, axes=(0, 0))
    out[x1] += s * np.tensordot(g[x2], a, axes=(0, 0))
    return out


def tensor_module_action(basis: OspBasis, key, slot: int, a: np.ndarray, n: int) -> np.ndarray:
    """Generator acting on slot ``slot`` (0-based) of an n-fold tensor array.

    ``a`` has shape (d,)*n + (S,).  The sign (-1)^{(X1+X2) sum_{i<slot} |Z_i|}
    comes from moving the generator past the earlier tensor factors.
    """
    par = basis.parity
    grade = basis.grade(*key)
    moved = np.moveaxis(a, slot, 0)
    acted = module_action(basis, key, moved)
    out = np.moveaxis(acted, 0, slot)
    if grade and slot:
        d = len(par)
        idx = np.indices((d,) * slot).reshape(slot, -1)
        total = par[idx].sum(axis=0) % 2
        sign = np.where(total == 1, -1, 1).reshape((d,) * slot)
        out = out * sign.reshape((d,) * slot + (1,) * (n - slot + 1))
    return out
