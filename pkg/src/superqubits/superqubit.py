"""n-superqubit states and the global unitary orthosymplectic action.

Basis labels are strings over ``0``, ``1`` and ``b`` (the odd state, printed
as a bullet in the literature).  Tensor order is lexicographic in ``0 < 1 < b``
with the first superqubit most significant.  Canonical order puts the even
labels (an even number of ``b``) first; inside each parity block labels are
sorted by number of ``b``, then by the qubit string left after deleting the
``b``s, then lexicographically.  For two superqubits this gives
00, 01, 10, 11, bb | 0b, b0, 1b, b1.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grassmann import (
    AlgebraContext,
    GrassmannError,
    Parity,
    Supernumber,
    format_supernumber,
    max_generator_pair,
    parse_supernumber,
)
from .osp import (
    FormConvention,
    OspBasis,
    basis_from_form,
    build_forms,
    build_generators,
    check_algebra_element,
    uosp_element,
    uosp_real_basis,
)
from .supermatrix import Supermatrix, expm, graded_tensor, tensor_power

SYMBOLS = "01b"
MAX_STATE_N = 5
MAX_ALGEBRA_N = 3


class SuperqubitError(ValueError):
    pass


def label_parity(label: str) -> int:
    return label.count("b") % 2


def tensor_labels(n: int) -> list[str]:
    return ["".join(t) for t in itertools.product(SYMBOLS, repeat=n)]


def _canonical_key(label: str):
    content = label.replace("b", "")
    return (label_parity(label), label.count("b"), content, [SYMBOLS.index(c) for c in label])


@lru_cache(maxsize=None)
def canonical_labels(n: int) -> tuple[str, ...]:
    return tuple(sorted(tensor_labels(n), key=_canonical_key))


def global_dims(n: int) -> tuple[int, int]:
    if n < 1:
        raise SuperqubitError("n must be positive")
    return ((3 ** n + 1) // 2, (3 ** n - 1) // 2)


@dataclass(frozen=True)
class BasisPermutation:
    """``order[c]`` is the tensor index of canonical position ``c``."""

    n: int
    order: tuple

    @classmethod
    def for_n(cls, n: int) -> "BasisPermutation":
        index = {lab: i for i, lab in enumerate(tensor_labels(n))}
        return cls(n, tuple(index[lab] for lab in canonical_labels(n)))

    @property
    def tensor_to_canonical(self) -> np.ndarray:
        inv = np.empty(len(self.order), dtype=int)
        inv[list(self.order)] = np.arange(len(self.order))
        return inv

    def matrix(self, ctx: AlgebraContext | None = None) -> Supermatrix:
        ctx = ctx or AlgebraContext(0)
        d = len(self.order)
        body = np.zeros((d, d))
        body[np.arange(d), list(self.order)] = 1
        tensor_par = [label_parity(lab) for lab in tensor_labels(self.n)]
        canon_par = [label_parity(lab) for lab in canonical_labels(self.n)]
        return Supermatrix.from_body(ctx, canon_par, tensor_par, body)

    def to_canonical(self, m: Supermatrix) -> Supermatrix:
        """S M S^T for a square tensor-ordered matrix."""
        return m.permuted(list(self.order), list(self.order))

    def to_tensor(self, m: Supermatrix) -> Supermatrix:
        inv = self.tensor_to_canonical
        return m.permuted(inv, inv)


def single_form(ctx: AlgebraContext | None = None) -> Supermatrix:
    """The (2|1) form g = epsilon + 1 of one superqubit."""
    return build_forms(FormConvention(0, 1, "sp_first", "identity"), ctx)[2]


def build_global_form(n: int, ctx: AlgebraContext | None = None):
    """(S, G) with G = S g^{(x)n} S^T in canonical order."""
    if not 1 <= n <= MAX_STATE_N:
        raise SuperqubitError(f"n must be in 1..{MAX_STATE_N}")
    ctx = ctx or AlgebraContext(0)
    perm = BasisPermutation.for_n(n)
    g_tilde = tensor_power(single_form(ctx), n)
    G = perm.to_canonical(g_tilde)
    return perm, G


@lru_cache(maxsize=None)
def _global_basis_cached(n: int) -> OspBasis:
    _, G = build_global_form(n)
    return basis_from_form(G)


def global_basis(n: int, ctx: AlgebraContext | None = None) -> OspBasis:
    """Generator basis of the global uosp algebra for n superqubits."""
    if not 1 <= n <= MAX_ALGEBRA_N:
        raise SuperqubitError(f"global algebra construction is limited to n <= {MAX_ALGEBRA_N}")
    basis = _global_basis_cached(n)
    return basis if ctx is None or ctx == basis.G.ctx else basis.with_context(ctx)


def local_basis(ctx: AlgebraContext | None = None) -> OspBasis:
    return build_generators(FormConvention(0, 1, "sp_first", "identity"), ctx)


def local_element(ctx: AlgebraContext, gamma=0.0, gamma_p=0.0, gamma_m=0.0, rho=None) -> Supermatrix:
    """uosp(2|1) element [[ig, g+ + i g-, -r#], [-g+ + i g-, -ig, -r], [r, -r#, 0]]."""
    rho = ctx.zero() if rho is None else rho
    if rho.grade() not in (Parity.ODD, Parity.ZERO):
        raise SuperqubitError("rho must be odd")
    gp = complex(gamma_p, gamma_m)
    gm = complex(-gamma_p, gamma_m)
    ig = 1j * gamma
    entries = [
        [ig, gp, -rho.superstar()],
        [gm, -ig, -rho],
        [rho, -rho.superstar(), 0],
    ]
    return Supermatrix.from_entries(ctx, [0, 0, 1], [0, 0, 1], entries)


def _column_twist(n: int) -> np.ndarray:
    # (-1)^{C(#b, 2)} per canonical label
    return np.array([-1 if math.comb(lab.count("b"), 2) % 2 else 1 for lab in canonical_labels(n)])


def local_embed(slot: int, x: Supermatrix, n: int, check: bool = True,
                convention: str = "printed") -> Supermatrix:
    """Embed a uosp(2|1) element at ``slot`` (0-based) of n superqubits, in canonical order.

    ``koszul`` is S (1 x .. x x .. x 1) S^T with the graded tensor product; it
    respects brackets but preserves the Koszul-signed form rather than
    S g^{(x)n} S^T.  ``printed`` multiplies its columns by (-1)^{C(#b, 2)}, which
    lands in the global uosp algebra and reproduces the printed two-superqubit
    matrix; its slot images need not commute once odd parameters are present.
    """
    if not 0 <= slot < n:
        raise SuperqubitError(f"slot {slot} outside 0..{n - 1}")
    if x.nrows != 3 or list(x.row_parity) != [0, 0, 1] or list(x.col_parity) != [0, 0, 1]:
        raise SuperqubitError("x must be a (2|1)x(2|1) supermatrix")
    if convention not in ("printed", "koszul"):
        raise SuperqubitError(f"unknown convention {convention!r}")
    if check:
        report = check_algebra_element(x, single_form(x.ctx))
        if not report.passed:
            raise SuperqubitError(f"x is not in uosp(2|1): {report.residuals}")
    one = Supermatrix.identity(x.ctx, [0, 0, 1])
    factors = [one] * n
    factors[slot] = x
    out = factors[0]
    for f in factors[1:]:
        out = graded_tensor(out, f)
    out = BasisPermutation.for_n(n).to_canonical(out)
    if convention == "printed":
        out = Supermatrix(out.ctx, out.row_parity, out.col_parity,
                          out.data * _column_twist(n)[None, :, None])
    return out


def local_sum(xs: list, check: bool = True, convention: str = "printed") -> Supermatrix:
    """Sum of the slot embeddings of a list of per-slot elements."""
    n = len(xs)
    total = None
    for k, x in enumerate(xs):
        term = local_embed(k, x, n, check, convention)
        total = term if total is None else total + term
    return total


# -- states -------------------------------------------------------------------------


class SuperqubitState:
    """Coefficient supervector over the 3^n labels, stored in canonical order.

    ``column`` holds the components a_X with |psi> = sum_X a_X |X> read as a
    column supervector.  The ket text format writes coefficients to the left of
    the basis vector, which differs by (-1)^{|X||c|} on odd labels.
    """

    __slots__ = ("n", "column")

    def __init__(self, n: int, column: Supermatrix):
        if not 1 <= n <= MAX_STATE_N:
            raise SuperqubitError(f"n must be in 1..{MAX_STATE_N}")
        labels = canonical_labels(n)
        if column.ncols != 1 or column.nrows != len(labels):
            raise SuperqubitError("column must be a 3^n x 1 supervector")
        self.n = n
        self.column = column

    @property
    def ctx(self) -> AlgebraContext:
        return self.column.ctx

    @property
    def labels(self):
        return canonical_labels(self.n)

    @classmethod
    def from_components(cls, n: int, ctx: AlgebraContext, comps: dict) -> "SuperqubitState":
        labels = canonical_labels(n)
        index = {lab: i for i, lab in enumerate(labels)}
        data = np.zeros((len(labels), 1, ctx.size), dtype=complex)
        for lab, c in comps.items():
            lab = normalise_label(lab)
            if lab not in index:
                raise SuperqubitError(f"unknown label {lab!r} for n={n}")
            c = c if isinstance(c, Supernumber) else ctx.scalar(c)
            data[index[lab], 0] += c.to_array()
        par = [label_parity(lab) for lab in labels]
        return cls(n, Supermatrix(ctx, par, [0], data))

    @classmethod
    def basis_state(cls, label: str, ctx: AlgebraContext | None = None) -> "SuperqubitState":
        label = normalise_label(label)
        return cls.from_components(len(label), ctx or AlgebraContext(0), {label: 1})

    @classmethod
    def from_kets(cls, n: int, ctx: AlgebraContext, kets: dict) -> "SuperqubitState":
        """Build from coefficients written to the left of the kets."""
        return cls.from_components(n, ctx, {lab: ket_to_component(lab, c) for lab, c in kets.items()})

    def component(self, label: str) -> Supernumber:
        idx = self.labels.index(normalise_label(label))
        return self.column.entry(idx, 0)

    def components(self) -> dict:
        return {lab: self.column.entry(i, 0) for i, lab in enumerate(self.labels)}

    def kets(self) -> dict:
        return {lab: ket_to_component(lab, c) for lab, c in self.components().items()}

    def tensor_components(self) -> np.ndarray:
        """Coefficient array in tensor order, shape (3,)*n + (S,)."""
        perm = BasisPermutation.for_n(self.n)
        data = self.column.data[perm.tensor_to_canonical, 0, :]
        return data.reshape((3,) * self.n + (self.ctx.size,))

    def with_context(self, ctx: AlgebraContext) -> "SuperqubitState":
        return SuperqubitState(self.n, self.column.with_context(ctx))

    def grades_consistent(self) -> bool:
        """Every coefficient has the grade of its label (even total grade)."""
        return self.column.grade() in (Parity.EVEN, Parity.ZERO)

    def __eq__(self, other):
        if not isinstance(other, SuperqubitState):
            return NotImplemented
        return self.n == other.n and self.column == other.column

    __hash__ = None

    def allclose(self, other, atol=1e-12) -> bool:
        return self.n == other.n and self.column.allclose(other.column, atol)

    def __add__(self, other):
        return SuperqubitState(self.n, self.column + other.column)

    def __sub__(self, other):
        return SuperqubitState(self.n, self.column - other.column)

    def __str__(self):
        return format_state(self)

    def __repr__(self):
        return f"SuperqubitState({format_state(self)!r})"


def normalise_label(label: str) -> str:
    label = label.replace("•", "b").replace("*", "b")
    if not label or any(c not in SYMBOLS for c in label):
        raise SuperqubitError(f"bad basis label {label!r}")
    return label


def ket_to_component(label: str, c: Supernumber) -> Supernumber:
    """Sign rule for moving a coefficient across |X>; its own inverse."""
    if not label_parity(label):
        return c
    return c.even_part() - c.odd_part()


def apply(g: Supermatrix, psi: SuperqubitState) -> SuperqubitState:
    if g.ctx != psi.ctx:
        ctx = AlgebraContext(max(g.ctx.num_pairs, psi.ctx.num_pairs))
        g, psi = g.with_context(ctx), psi.with_context(ctx)
    if not np.array_equal(g.col_parity, psi.column.row_parity):
        raise SuperqubitError("group element does not match the state's canonical grading")
    return SuperqubitState(psi.n, g @ psi.column)


def inner_product(phi: SuperqubitState, psi: SuperqubitState) -> Supernumber:
    """<phi|psi> = sum_X superstar(phi_X) psi_X in canonical order.

    UOSp-invariant for even states.  For odd states the invariant pairing is
    sum_X psi_X superstar(phi_X) instead (the two differ by (-1)^{|X|} signs).
    """
    if phi.n != psi.n:
        raise SuperqubitError("states have different n")
    if phi.ctx != psi.ctx:
        ctx = AlgebraContext(max(phi.ctx.num_pairs, psi.ctx.num_pairs))
        phi, psi = phi.with_context(ctx), psi.with_context(ctx)
    bra = phi.column.superstar()
    total = phi.ctx.zero()
    for i in range(phi.column.nrows):
        total = total + bra.entry(i, 0) * psi.column.entry(i, 0)
    return total


def norm2(psi: SuperqubitState) -> Supernumber:
    return inner_product(psi, psi)


def bilinear_invariant(psi: SuperqubitState, G: Supermatrix | None = None) -> Supernumber:
    """psi^st G psi, preserved by every orthosymplectic group element."""
    if G is None:
        G = build_global_form(psi.n, psi.ctx)[1]
    G = G.with_context(psi.ctx)
    value = psi.column.st @ G @ psi.column
    return value.entry(0, 0)


def qubit_restrict(psi: SuperqubitState, atol: float = 0.0) -> np.ndarray:
    """2^n amplitudes of a purely bosonic state, in tensor order of the 0/1 labels."""
    out = []
    for lab in tensor_labels(psi.n):
        c = psi.component(lab)
        if "b" in lab:
            if c.max_abs() > atol:
                raise SuperqubitError(f"state has a component on {lab}")
            continue
        if c.soul().max_abs() > atol:
            raise SuperqubitError(f"coefficient of {lab} has a soul")
        out.append(c.body)
    return np.array(out, dtype=complex)


# -- state text format -----------------------------------------------------------------

_KET = re.compile(r"\|([01b•]+)(?:>|⟩)")


def format_state(psi: SuperqubitState) -> str:
    parts = []
    for lab, c in psi.kets().items():
        if c.is_zero():
            continue
        parts.append(f"({format_supernumber(c)})*|{lab}>")
    return " + ".join(parts) if parts else "0"


def _split_top_level(text: str) -> list[str]:
    # split on '+' outside parentheses and immediately after a ket
    parts, depth, cur = [], 0, ""
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and cur.rstrip().endswith((">", "⟩")):
            parts.append(cur)
            cur = ch if ch == "-" else ""
        else:
            cur += ch
        i += 1
    if cur.strip():
        parts.append(cur)
    return parts


def parse_state(text: str, ctx: AlgebraContext | None = None) -> SuperqubitState:
    text = "\n".join(ln for ln in text.splitlines() if not ln.lstrip().startswith("%")).strip()
    terms = _split_top_level(text)
    labels = []
    pieces = []
    for term in terms:
        m = _KET.search(term)
        if not m:
            raise SuperqubitError(f"term {term.strip()!r} has no ket")
        coeff = term[:m.start()].strip()
        if term[m.end():].strip():
            raise SuperqubitError(f"unexpected text after ket in {term.strip()!r}")
        if coeff.endswith("*"):
            coeff = coeff[:-1].strip()
        if coeff in ("", "+"):
            coeff = "1"
        elif coeff == "-":
            coeff = "-1"
        labels.append(normalise_label(m.group(1)))
        pieces.append(coeff)
    if not labels:
        raise SuperqubitError("empty state")
    n = len(labels[0])
    if any(len(lab) != n for lab in labels):
        raise SuperqubitError("labels have different lengths")
    if ctx is None:
        ctx = AlgebraContext(max(max_generator_pair(c) for c in pieces))
    kets = {}
    for lab, coeff in zip(labels, pieces):
        value = parse_supernumber(coeff, ctx)
        kets[lab] = kets.get(lab, ctx.zero()) + value
    return SuperqubitState.from_kets(n, ctx, kets)


# -- entangled-state generation -------------------------------------------------------


def paper54_basis(ctx: AlgebraContext) -> OspBasis:
    return build_generators(FormConvention(2, 2, "so_first", "paper54"), ctx)


def tau12_key() -> tuple[int, int]:
    """Index pair of tau_12: orthogonal index 1, first symplectic index 2."""
    return (0, 6)


def generate_genstate1(tau: Supernumber):
    """exp(X_tau12) and its action on |00>."""
    ctx = tau.ctx
    basis = paper54_basis(ctx)
    x = uosp_element(basis, {tau12_key(): tau})
    g = expm(x)
    psi = apply(g, SuperqubitState.basis_state("00", ctx))
    return g, psi


def genstate1_expected(tau: Supernumber) -> SuperqubitState:
    """(1 + tau tau#/2)|00> - tau#|b1>, written with left coefficients."""
    ctx = tau.ctx
    return SuperqubitState.from_kets(2, ctx, {
        "00": ctx.one() + tau * tau.superstar() * 0.5,
        "b1": -tau.superstar(),
    })


def tsirelson_expected(phi: float, tau: Supernumber, lam: Supernumber) -> SuperqubitState:
    """N [cos(phi)|00> + sin(phi)|11> - tau|b1> - lambda|1b>] with the printed N."""
    ctx = tau.ctx
    t2 = tau * tau.superstar()
    l2 = lam * lam.superstar()
    norm = ctx.one() + t2 * 0.5 + l2 * 0.5 + t2 * l2 * 0.75
    return SuperqubitState.from_kets(2, ctx, {
        "00": norm * math.cos(phi),
        "11": norm * math.sin(phi),
        "b1": -(norm * tau),
        "1b": -(norm * lam),
    })


class UnreachableStateError(SuperqubitError):
    pass


def _odd_key_coupling(basis: OspBasis, src: str, dst: str):
    """Odd generator key whose envelope element moves |src> only into |dst>."""
    labels = canonical_labels(2)
    i, j = labels.index(src), labels.index(dst)
    ctx = basis.G.ctx
    for key in sorted(basis.generators):
        if not basis.grade(*key):
            continue
        col = uosp_element(basis, {key: ctx.theta(1)}).data[:, i, :]
        if list(np.flatnonzero(np.any(col != 0, axis=1))) == [j]:
            return key
    raise SuperqubitError(f"no odd generator couples {src} to {dst} alone")


def _bosonic_start(ctx: AlgebraContext, alpha: int, beta: int) -> Supermatrix | None:
    """Local rotation taking |00> to alpha|00> + beta|11> for (alpha, beta) in {(+-1, 0), (0, +-1)}."""
    # the gamma_+ direction rotates one slot: |0> -> cos(t)|0> - sin(t)|1>
    if (alpha, beta) == (1, 0):
        return None
    angles = {(-1, 0): (math.pi, 0.0), (0, 1): (math.pi / 2, math.pi / 2),
              (0, -1): (math.pi / 2, -math.pi / 2)}[(alpha, beta)]
    return expm(local_sum([local_element(ctx, gamma_p=t) for t in angles]))


def generate_tsirelson(phi: float, tau: Supernumber, lam: Supernumber, max_iter: int = 64):
    """Group elements whose ordered product takes |00> to the Tsirelson-bound state.

    The bilinear invariant psi^st G psi vanishes on |00> and has body
    sin(2 phi) on the target, so only phi with sin(2 phi) = 0 is reachable; other
    angles raise UnreachableStateError.  For reachable phi the sequence is a
    local bosonic rotation (omitted when phi = 0) followed by two odd
    exponentials whose parameters solve a nilpotent fixed point exactly.
    Returns (steps, psi) with psi = steps[-1] ... steps[0] |00>.
    """
    ctx = tau.ctx
    if lam.ctx != ctx:
        raise GrassmannError("tau and lambda live in different algebras")
    for name, v in (("tau", tau), ("lambda", lam)):
        if v.grade() not in (Parity.ODD, Parity.ZERO):
            raise SuperqubitError(f"{name} must be odd")
    c, s = math.cos(phi), math.sin(phi)
    if abs(c * s) > 1e-12:
        raise UnreachableStateError(
            f"psi^st G psi has body sin(2 phi) = {2 * c * s:.6g} on the target but 0 on |00>; "
            "UOSp(5|4) preserves it")
    alpha, beta = round(c), round(s)
    start = SuperqubitState.basis_state("00", ctx)
    target = tsirelson_expected(phi, tau, lam)
    h = _bosonic_start(ctx, alpha, beta)
    seed = start if h is None else apply(h, start)
    if tau.is_zero() and lam.is_zero():
        return ([] if h is None else [h]), seed
    src = "00" if alpha else "11"
    basis = paper54_basis(ctx)
    key_b1 = _odd_key_coupling(basis, src, "b1")
    key_1b = _odd_key_coupling(basis, src, "1b")
    unit_b1 = uosp_element(basis, {key_b1: ctx.theta(1)})
    unit_1b = uosp_element(basis, {key_1b: ctx.theta(1)})
    labels = canonical_labels(2)
    i = labels.index(src)

    def response(unit, dst):
        # first-order map xi -> component on dst is xi -> a*xi + b*xi#
        entry = unit.entry(labels.index(dst), i).coeffs
        w = seed.component(src).body
        return entry.get(1, 0) * w, entry.get(2, 0) * w

    def invert(resp, delta):
        a, b = resp
        if a and not b:
            return delta * (1 / a)
        if b and not a:
            return delta.superstar() * (-1 / np.conj(b))
        raise SuperqubitError("odd generator response is not invertible")

    resp_b1, resp_1b = response(unit_b1, "b1"), response(unit_1b, "1b")
    xi, zeta = ctx.zero(), ctx.zero()
    for _ in range(max_iter):
        ga = expm(uosp_element(basis, {key_b1: xi}))
        gb = expm(uosp_element(basis, {key_1b: zeta}))
        psi = apply(gb, apply(ga, seed))
        d_b1 = target.component("b1") - psi.component("b1")
        d_1b = target.component("1b") - psi.component("1b")
        if max(d_b1.max_abs(), d_1b.max_abs()) <= 1e-14:
            break
        xi = xi + invert(resp_b1, d_b1)
        zeta = zeta + invert(resp_1b, d_1b)
    else:
        raise SuperqubitError("odd parameters did not converge")
    steps = ([] if h is None else [h]) + [ga, gb]
    return steps, psi


# -- orbit ranks ----------------------------------------------------------------------


def real_rank(vectors: list, tol: float = 1e-9) -> int:
    """Rank of complex vectors viewed as real vectors, by row reduction with a pivot threshold."""
    if not vectors:
        return 0
    rows = np.array([np.concatenate([v.real, v.imag]) for v in vectors], dtype=float)
    rank = 0
    ncols = rows.shape[1]
    for col in range(ncols):
        if rank == rows.shape[0]:
            break
        pivot = rank + int(np.argmax(np.abs(rows[rank:, col])))
        if abs(rows[pivot, col]) <= tol:
            continue
        rows[[rank, pivot]] = rows[[pivot, rank]]
        rows[rank] /= rows[rank, col]
        others = np.arange(rows.shape[0]) != rank
        rows[others] -= np.outer(rows[others, col], rows[rank])
        rank += 1
    return rank


def orbit_rank(generators: list, v: np.ndarray, tol: float = 1e-9) -> int:
    """Real dimension of span{T v} for body-only generators T."""
    v = np.asarray(v, dtype=complex)
    vecs = []
    for t in generators:
        body = t.body() if isinstance(t, Supermatrix) else np.asarray(t, dtype=complex)
        if isinstance(t, Supermatrix) and t.soul().max_abs() > 0:
            raise SuperqubitError("orbit_rank needs body-only generators")
        vecs.append(body @ v)
    return real_rank(vecs, tol)


def so_body_generators(p: int) -> list:
    """Real basis of so(2p+1) as body-only matrices (identity form)."""
    basis = build_generators(FormConvention(p, 0, "so_first", "identity"))
    return [x.body() for x in uosp_real_basis(basis, ("orthogonal",))]


def usp_body_generators(q: int) -> list:
    """Real basis of usp(2q) acting on C^{2q} with the standard Omega."""
    basis = build_generators(FormConvention(0, q, "so_first", "identity"))
    odd = basis.parity == 1
    return [x.body()[np.ix_(odd, odd)] for x in uosp_real_basis(basis, ("symplectic",))]


def qubit_usp_generators(n: int) -> list:
    """usp(2^n) acting on the qubit labels, preserving the restriction of the global form.

    For odd n the restriction of S g^{(x)n} S^T to the 0/1 labels is the
    antisymmetric epsilon^{(x)n}, so these matrices are the body generators of
    the global algebra that act only on the qubit subspace.
    """
    if n % 2 == 0:
        raise SuperqubitError("the qubit block carries a symplectic form only for odd n")
    _, G = build_global_form(n)
    labels = canonical_labels(n)
    qubit = [i for i, lab in enumerate(labels) if "b" not in lab]
    form = G.body().real[np.ix_(qubit, qubit)]
    sub = Supermatrix.from_body(AlgebraContext(0), (len(qubit), 0), (len(qubit), 0), form)
    basis = basis_from_form(sub)
    return [x.body() for x in uosp_real_basis(basis, ("symplectic",))]


def local_qubit_generators(n: int) -> list:
    """su(2) bodies of every local uosp(2|1), restricted to the qubit labels (tensor order)."""
    ctx = AlgebraContext(0)
    labels = canonical_labels(n)
    qubit_canon = [labels.index(lab) for lab in tensor_labels(n) if "b" not in lab]
    gens = []
    for slot in range(n):
        for kw in ({"gamma": 1.0}, {"gamma_p": 1.0}, {"gamma_m": 1.0}):
            x = local_embed(slot, local_element(ctx, **kw), n)
            gens.append(x.body()[np.ix_(qubit_canon, qubit_canon)])
    return gens


def branch_dims(n: int) -> list:
    """[(p, multiplicity, block_dim, parity)] for the su(2)^n branching by number p of qubit slots.

    p = n..0 counts slots carrying the doublet; the remaining n - p slots hold
    the odd state, so the parity of a block is (n - p) mod 2.
    """
    if n < 1:
        raise SuperqubitError("n must be positive")
    return [(p, math.comb(n, p), 2 ** p, (n - p) % 2) for p in range(n, -1, -1)]


def branch_totals(n: int) -> tuple[int, int]:
    even = sum(m * d for _, m, d, par in branch_dims(n) if par == 0)
    odd = sum(m * d for _, m, d, par in branch_dims(n) if par == 1)
    return even, odd
