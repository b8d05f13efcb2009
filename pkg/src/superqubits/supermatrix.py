"""Graded matrices over the Grassmann algebra.

Entries are stored densely as a complex array of shape ``(rows, cols, 2**(2m))``
whose last axis runs over monomial masks.  Every row and column index carries a
parity; in canonical order the even indices come first, which gives the usual
``(p|q) x (r|s)`` block form, but tensor products keep their natural
interleaved order until explicitly permuted.
"""

from __future__ import annotations

import json
import math
import re

import numpy as np

from .grassmann import (
    ATOL,
    AlgebraContext,
    GrassmannError,
    Parity,
    Supernumber,
    format_supernumber,
    max_generator_pair,
    merge_signs,
    parity_table,
    parse_supernumber,
    star_table,
)


class SupermatrixError(ValueError):
    pass


class SingularError(SupermatrixError):
    pass


def _parity_array(spec) -> np.ndarray:
    if isinstance(spec, tuple) and len(spec) == 2 and all(isinstance(x, (int, np.integer)) for x in spec):
        p, q = spec
        return np.array([0] * p + [1] * q, dtype=np.int8)
    arr = np.asarray(spec, dtype=np.int8)
    if arr.ndim != 1 or np.any((arr != 0) & (arr != 1)):
        raise SupermatrixError(f"bad parity specification {spec!r}")
    return arr


def _grassmann_matmul(a: np.ndarray, b: np.ndarray, num_pairs: int) -> np.ndarray:
    """(R,K,S) x (K,C,S) -> (R,C,S), entry products taken left to right."""
    size = a.shape[2]
    out = np.zeros((a.shape[0], b.shape[1], size), dtype=complex)
    sa = np.flatnonzero(np.any(a != 0, axis=(0, 1)))
    sb = np.flatnonzero(np.any(b != 0, axis=(0, 1)))
    if len(sa) == 0 or len(sb) == 0:
        return out
    ma, mb = np.meshgrid(sa, sb, indexing="ij")
    signs = merge_signs(ma, mb)
    ia, ib = np.nonzero(signs)
    if len(ia) == 0:
        return out
    result = (ma | mb)[ia, ib]
    order = np.argsort(result, kind="stable")
    ia, ib, result = ia[order], ib[order], result[order]
    sgn = signs[ia, ib]
    prod = np.einsum("ika,kjb->ijab", a[:, :, sa], b[:, :, sb])
    terms = prod[:, :, ia, ib] * sgn
    starts = np.flatnonzero(np.r_[True, result[1:] != result[:-1]])
    out[:, :, result[starts]] = np.add.reduceat(terms, starts, axis=2)
    return out


def _grassmann_mul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Broadcast elementwise Grassmann product over the last (monomial) axis."""
    x, y = np.broadcast_arrays(x, y)
    out = np.zeros(x.shape, dtype=complex)
    sx = np.flatnonzero(np.any(x != 0, axis=tuple(range(x.ndim - 1))))
    sy = np.flatnonzero(np.any(y != 0, axis=tuple(range(y.ndim - 1))))
    for a in sx:
        signs = merge_signs(a, sy)
        for b, s in zip(sy, signs):
            if s:
                out[..., a | b] += s * x[..., a] * y[..., b]
    return out


class Supermatrix:
    """Immutable graded matrix with Supernumber entries."""

    __slots__ = ("ctx", "row_parity", "col_parity", "data")

    def __init__(self, ctx: AlgebraContext, row_parity, col_parity, data, grade=None):
        row_parity = _parity_array(row_parity)
        col_parity = _parity_array(col_parity)
        data = np.array(data, dtype=complex)
        expected = (len(row_parity), len(col_parity), ctx.size)
        if data.shape != expected:
            raise SupermatrixError(f"data shape {data.shape} != {expected}")
        data.setflags(write=False)
        row_parity.setflags(write=False)
        col_parity.setflags(write=False)
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "row_parity", row_parity)
        object.__setattr__(self, "col_parity", col_parity)
        object.__setattr__(self, "data", data)
        if grade is not None:
            actual = self.grade()
            if isinstance(grade, (int, np.integer)):
                want = (Parity.EVEN, Parity.ODD)[int(grade) % 2]
            else:
                want = grade if isinstance(grade, Parity) else Parity(grade)
            if want in (Parity.EVEN, Parity.ODD) and actual not in (want, Parity.ZERO):
                raise SupermatrixError(f"declared grade {want.value} but entries are {actual.value}")

    def __setattr__(self, name, value):
        raise AttributeError("Supermatrix is immutable")

    # -- constructors -------------------------------------------------------------

    @classmethod
    def zeros(cls, ctx, row_parity, col_parity=None):
        rp = _parity_array(row_parity)
        cp = rp if col_parity is None else _parity_array(col_parity)
        return cls(ctx, rp, cp, np.zeros((len(rp), len(cp), ctx.size), dtype=complex))

    @classmethod
    def identity(cls, ctx, parity):
        rp = _parity_array(parity)
        data = np.zeros((len(rp), len(rp), ctx.size), dtype=complex)
        data[:, :, 0] = np.eye(len(rp))
        return cls(ctx, rp, rp, data)

    @classmethod
    def from_body(cls, ctx, row_parity, col_parity, body, grade=None):
        body = np.asarray(body, dtype=complex)
        data = np.zeros(body.shape + (ctx.size,), dtype=complex)
        data[:, :, 0] = body
        return cls(ctx, row_parity, col_parity, data, grade=grade)

    @classmethod
    def from_entries(cls, ctx, row_parity, col_parity, entries, grade=None):
        rp, cp = _parity_array(row_parity), _parity_array(col_parity)
        data = np.zeros((len(rp), len(cp), ctx.size), dtype=complex)
        for i, row in enumerate(entries):
            if len(row) != len(cp):
                raise SupermatrixError(f"row {i} has {len(row)} entries, expected {len(cp)}")
            for j, e in enumerate(row):
                if isinstance(e, Supernumber):
                    if e.ctx != ctx:
                        raise GrassmannError("context mismatch in entries")
                    for m, c in e.coeffs.items():
                        data[i, j, m] = c
                else:
                    data[i, j, 0] = complex(e)
        return cls(ctx, rp, cp, data, grade=grade)

    # -- basic properties ------------------------------------------------------------

    @property
    def shape(self):
        """((p, q), (r, s)) parity counts of rows and columns."""
        rp, cp = self.row_parity, self.col_parity
        return ((int((rp == 0).sum()), int(rp.sum())), (int((cp == 0).sum()), int(cp.sum())))

    @property
    def nrows(self) -> int:
        return len(self.row_parity)

    @property
    def ncols(self) -> int:
        return len(self.col_parity)

    def is_canonical(self) -> bool:
        return bool(np.all(np.diff(self.row_parity) >= 0) and np.all(np.diff(self.col_parity) >= 0))

    def entry(self, i: int, j: int) -> Supernumber:
        return Supernumber.from_array(self.ctx, self.data[i, j])

    def entries(self):
        return [[self.entry(i, j) for j in range(self.ncols)] for i in range(self.nrows)]

    def body(self) -> np.ndarray:
        return self.data[:, :, 0].copy()

    def soul(self) -> "Supermatrix":
        d = self.data.copy()
        d[:, :, 0] = 0
        return self._like(d)

    def _like(self, data, row_parity=None, col_parity=None) -> "Supermatrix":
        return Supermatrix(self.ctx,
                           self.row_parity if row_parity is None else row_parity,
                           self.col_parity if col_parity is None else col_parity,
                           data)

    def _component_grades(self) -> np.ndarray:
        par = parity_table(self.ctx.num_pairs)
        return (par[None, None, :] + self.row_parity[:, None, None] + self.col_parity[None, :, None]) % 2

    def grade(self) -> Parity:
        g = self._component_grades()
        nz = self.data != 0
        kinds = set(np.unique(g[nz]).tolist())
        if not kinds:
            return Parity.ZERO
        if kinds == {0}:
            return Parity.EVEN
        if kinds == {1}:
            return Parity.ODD
        return Parity.MIXED

    def grade_int(self) -> int:
        g = self.grade()
        if g == Parity.MIXED:
            raise SupermatrixError("supermatrix is inhomogeneous")
        return 1 if g == Parity.ODD else 0

    def even_part(self) -> "Supermatrix":
        return self._like(np.where(self._component_grades() == 0, self.data, 0))

    def odd_part(self) -> "Supermatrix":
        return self._like(np.where(self._component_grades() == 1, self.data, 0))

    def blocks(self):
        """(A, B, C, D) raw data blocks by row/column parity."""
        re_, ro = self.row_parity == 0, self.row_parity == 1
        ce, co = self.col_parity == 0, self.col_parity == 1
        d = self.data
        return d[re_][:, ce], d[re_][:, co], d[ro][:, ce], d[ro][:, co]

    # -- linear structure ----------------------------------------------------------------

    def _check_same(self, other):
        if not isinstance(other, Supermatrix):
            raise TypeError(f"expected Supermatrix, got {type(other).__name__}")
        if other.ctx != self.ctx:
            raise SupermatrixError("algebra context mismatch")
        if not (np.array_equal(self.row_parity, other.row_parity)
                and np.array_equal(self.col_parity, other.col_parity)):
            raise SupermatrixError("shape/grading mismatch")

    def __add__(self, other):
        self._check_same(other)
        return self._like(self.data + other.data)

    def __sub__(self, other):
        self._check_same(other)
        return self._like(self.data - other.data)

    def __neg__(self):
        return self._like(-self.data)

    def __mul__(self, c):
        if isinstance(c, Supernumber):
            return scalar_right_mul(self, c)
        return self._like(self.data * complex(c))

    def __rmul__(self, c):
        if isinstance(c, Supernumber):
            return scalar_left_mul(c, self)
        return self._like(self.data * complex(c))

    def __truediv__(self, c):
        return self._like(self.data / complex(c))

    def __matmul__(self, other):
        return matmul(self, other)

    # -- comparison ------------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Supermatrix):
            return NotImplemented
        return (self.ctx == other.ctx
                and np.array_equal(self.row_parity, other.row_parity)
                and np.array_equal(self.col_parity, other.col_parity)
                and np.array_equal(self.data, other.data))

    __hash__ = None

    def max_abs(self) -> float:
        return float(np.abs(self.data).max(initial=0.0))

    def allclose(self, other, atol: float = ATOL) -> bool:
        self._check_same(other)
        return bool(np.all(np.abs(self.data - other.data) <= atol))

    def chop(self, atol: float = ATOL) -> "Supermatrix":
        re_, im_ = self.data.real.copy(), self.data.imag.copy()
        re_[np.abs(re_) <= atol] = 0.0
        im_[np.abs(im_) <= atol] = 0.0
        return self._like(re_ + 1j * im_)

    # -- graded operations ------------------------------------------------------------

    def supertranspose(self) -> "Supermatrix":
        return supertranspose(self)

    st = property(lambda self: supertranspose(self))

    def superstar(self) -> "Supermatrix":
        image, sign = star_table(self.ctx.num_pairs)
        out = np.zeros_like(self.data)
        out[:, :, image] = np.conj(self.data) * sign
        return self._like(out)

    def superadjoint(self) -> "Supermatrix":
        return supertranspose(self.superstar())

    def permuted(self, rows=None, cols=None) -> "Supermatrix":
        """Reindex: new row k is old row ``rows[k]`` (likewise columns)."""
        rows = np.arange(self.nrows) if rows is None else np.asarray(rows)
        cols = np.arange(self.ncols) if cols is None else np.asarray(cols)
        return Supermatrix(self.ctx, self.row_parity[rows], self.col_parity[cols],
                           self.data[rows][:, cols])

    def canonical_order(self):
        """Stable permutations putting even rows/cols first."""
        return (np.argsort(self.row_parity, kind="stable"), np.argsort(self.col_parity, kind="stable"))

    def with_context(self, ctx: AlgebraContext) -> "Supermatrix":
        """Embed into an algebra with at least as many generator pairs."""
        if ctx.num_pairs < self.ctx.num_pairs:
            nz = np.flatnonzero(np.any(self.data != 0, axis=(0, 1)))
            if len(nz) and nz.max() >= ctx.size:
                raise SupermatrixError("entries use generators beyond the target context")
            return Supermatrix(ctx, self.row_parity, self.col_parity, self.data[:, :, :ctx.size])
        data = np.zeros((self.nrows, self.ncols, ctx.size), dtype=complex)
        data[:, :, :self.ctx.size] = self.data
        return Supermatrix(ctx, self.row_parity, self.col_parity, data)

    def inverse(self) -> "Supermatrix":
        return inverse(self)

    def berezinian(self) -> Supernumber:
        return berezinian(self)

    def __repr__(self):
        (p, q), (r, s) = self.shape
        return f"<Supermatrix ({p}|{q})x({r}|{s}) pairs={self.ctx.num_pairs} grade={self.grade().value}>"

    def __str__(self):
        return format_matrix(self)


# -- products ------------------------------------------------------------------------


def matmul(m: Supermatrix, n: Supermatrix) -> Supermatrix:
    if m.ctx != n.ctx:
        raise SupermatrixError("algebra context mismatch")
    if not np.array_equal(m.col_parity, n.row_parity):
        raise SupermatrixError(f"cannot multiply {m.shape} by {n.shape}")
    return Supermatrix(m.ctx, m.row_parity, n.col_parity,
                       _grassmann_matmul(m.data, n.data, m.ctx.num_pairs))


def _homogeneous_grade(alpha: Supernumber) -> int:
    g = alpha.grade()
    if g == Parity.MIXED:
        raise SupermatrixError("scalar must be homogeneous; split it into even and odd parts")
    return 1 if g == Parity.ODD else 0


def scalar_left_mul(alpha: Supernumber, m: Supermatrix) -> Supermatrix:
    """(alpha M)_{X1 X2} = (-1)^{X1 alpha} alpha M_{X1 X2}."""
    g = _homogeneous_grade(alpha)
    prod = _grassmann_mul(alpha.to_array()[None, None, :], m.data)
    if g:
        prod = prod * np.where(m.row_parity == 1, -1, 1)[:, None, None]
    return m._like(prod)


def scalar_right_mul(m: Supermatrix, alpha: Supernumber) -> Supermatrix:
    """(M alpha)_{X1 X2} = (-1)^{X2 alpha} M_{X1 X2} alpha."""
    g = _homogeneous_grade(alpha)
    prod = _grassmann_mul(m.data, alpha.to_array()[None, None, :])
    if g:
        prod = prod * np.where(m.col_parity == 1, -1, 1)[None, :, None]
    return m._like(prod)


def supertranspose(m: Supermatrix) -> Supermatrix:
    """Componentwise (M^st)_{X1 X2} = (-1)^{(X1 + g)(X1 + X2)} M_{X2 X1}.

    ``g`` is the grade of the homogeneous component, so inhomogeneous matrices
    are handled by linearity without an explicit split.
    """
    par = parity_table(m.ctx.num_pairs)
    t = np.transpose(m.data, (1, 0, 2))
    x1 = m.col_parity[:, None, None]
    x2 = m.row_parity[None, :, None]
    # component grade g = par(mask) + X1 + X2, so X1 + g = par(mask) + X2
    exponent = ((par[None, None, :] + x2) * (x1 + x2)) % 2
    return Supermatrix(m.ctx, m.col_parity, m.row_parity, np.where(exponent == 1, -t, t))


def superadjoint(m: Supermatrix) -> Supermatrix:
    return m.superadjoint()


def superbracket(m: Supermatrix, n: Supermatrix) -> Supermatrix:
    """MN - (-1)^{|M||N|} NM for homogeneous M, N."""
    sign = -1 if (m.grade_int() and n.grade_int()) else 1
    return m @ n - (n @ m) * sign


def direct_sum(m: Supermatrix, n: Supermatrix) -> Supermatrix:
    """Block diagonal sum, re-sorted so even indices of both summands come first."""
    if m.ctx != n.ctx:
        raise SupermatrixError("algebra context mismatch")
    rp = np.concatenate([m.row_parity, n.row_parity])
    cp = np.concatenate([m.col_parity, n.col_parity])
    data = np.zeros((len(rp), len(cp), m.ctx.size), dtype=complex)
    data[:m.nrows, :m.ncols] = m.data
    data[m.nrows:, m.ncols:] = n.data
    out = Supermatrix(m.ctx, rp, cp, data)
    if m.is_canonical() and n.is_canonical():
        return out.permuted(*out.canonical_order())
    return out


def graded_tensor(m: Supermatrix, n: Supermatrix) -> Supermatrix:
    """Graded Kronecker product in tensor index order.

    (M x N)_{(i,k),(j,l)} = (-1)^{|M_ij||k| + |N||j|} M_ij N_kl.  With this sign
    (M1 x N1)(M2 x N2) = (-1)^{|N1||M2|} (M1 M2) x (N1 N2).  An inhomogeneous
    right factor is split into its even and odd parts.
    """
    if m.ctx != n.ctx:
        raise SupermatrixError("algebra context mismatch")
    ng = n.grade()
    if ng == Parity.MIXED:
        return graded_tensor(m, n.even_part()) + graded_tensor(m, n.odd_part())
    n_odd = 1 if ng == Parity.ODD else 0
    par = parity_table(m.ctx.num_pairs)
    R, J = m.nrows, m.ncols
    K, L = n.nrows, n.ncols
    out = np.zeros((R, K, J, L, m.ctx.size), dtype=complex)
    # split M by the parity of its monomials
    for p_entry in (0, 1):
        mpart = np.where(par[None, None, :] == p_entry, m.data, 0)
        if not mpart.any():
            continue
        prod = _grassmann_mul(mpart[:, None, :, None, :], n.data[None, :, None, :, :])
        sign_k = np.where((p_entry * n.row_parity) % 2 == 1, -1, 1)
        sign_j = np.where((n_odd * m.col_parity) % 2 == 1, -1, 1)
        out += prod * sign_k[None, :, None, None, None] * sign_j[None, None, :, None, None]
    rp = (m.row_parity[:, None] + n.row_parity[None, :]).reshape(-1) % 2
    cp = (m.col_parity[:, None] + n.col_parity[None, :]).reshape(-1) % 2
    return Supermatrix(m.ctx, rp, cp, out.reshape(R * K, J * L, m.ctx.size))


def tensor_power(m: Supermatrix, n: int) -> Supermatrix:
    out = m
    for _ in range(n - 1):
        out = graded_tensor(out, m)
    return out


# -- inverse, determinant, exponential -------------------------------------------


def _require_square_even(m: Supermatrix, what: str):
    if not np.array_equal(m.row_parity, m.col_parity):
        raise SupermatrixError(f"{what} needs a square supermatrix with matching grading")
    if m.grade() not in (Parity.EVEN, Parity.ZERO):
        raise SupermatrixError(f"{what} needs an even supermatrix")


def _inverse_data(data: np.ndarray, num_pairs: int) -> np.ndarray:
    body = data[:, :, 0]
    try:
        binv = np.linalg.inv(body)
    except np.linalg.LinAlgError as exc:
        raise SingularError("body is singular") from exc
    if np.linalg.cond(body) > 1e12:
        raise SingularError("body is numerically singular")
    n = data.shape[0]
    size = data.shape[2]
    binv_full = np.zeros((n, n, size), dtype=complex)
    binv_full[:, :, 0] = binv
    soul = data.copy()
    soul[:, :, 0] = 0
    # M = B(1 + B^-1 S);  M^-1 = sum_k (-B^-1 S)^k B^-1, finite by nilpotency
    x = -_grassmann_matmul(binv_full, soul, num_pairs)
    term = binv_full
    total = binv_full.copy()
    for _ in range(2 * num_pairs):
        term = _grassmann_matmul(x, term, num_pairs)
        if not term.any():
            break
        total = total + term
    return total


def inverse(m: Supermatrix) -> Supermatrix:
    _require_square_even(m, "inverse")
    return m._like(_inverse_data(m.data, m.ctx.num_pairs))


def _trace(data: np.ndarray, ctx: AlgebraContext) -> Supernumber:
    return Supernumber.from_array(ctx, np.einsum("iim->m", data))


def even_det(data: np.ndarray, ctx: AlgebraContext) -> Supernumber:
    """Determinant of a square matrix whose entries are all even (hence commuting)."""
    n = data.shape[0]
    if n == 0:
        return ctx.one()
    par = parity_table(ctx.num_pairs)
    if np.any(data[:, :, par == 1] != 0):
        raise SupermatrixError("even_det needs entries of even grade")
    body = data[:, :, 0]
    d0 = np.linalg.det(body)
    if d0 == 0:
        return Supernumber.from_array(ctx, _det_laplace(data, ctx))
    binv = np.zeros_like(data)
    binv[:, :, 0] = np.linalg.inv(body)
    k = _grassmann_matmul(binv, data, ctx.num_pairs)
    k[:, :, 0] -= np.eye(n)
    # det(1 + K) = exp(tr log(1 + K)), log series finite since K is nilpotent
    logdet = ctx.zero()
    power = k
    for j in range(1, 2 * ctx.num_pairs + 1):
        if not power.any():
            break
        logdet = logdet + _trace(power, ctx) * ((-1) ** (j + 1) / j)
        power = _grassmann_matmul(power, k, ctx.num_pairs)
    return logdet.exp() * d0


def _det_laplace(data: np.ndarray, ctx: AlgebraContext) -> np.ndarray:
    # fallback for singular bodies; entries commute because they are even
    n = data.shape[0]
    if n == 1:
        return data[0, 0].copy()
    total = np.zeros(ctx.size, dtype=complex)
    for j in range(n):
        if not data[0, j].any():
            continue
        minor = np.delete(np.delete(data, 0, axis=0), j, axis=1)
        term = _grassmann_mul(data[0, j], _det_laplace(minor, ctx))
        total += term if j % 2 == 0 else -term
    return total


def berezinian_both(m: Supermatrix):
    """Return (D-form, A-form); either is None when its pivot block is singular."""
    _require_square_even(m, "berezinian")
    ctx = m.ctx
    a, b, c, d = m.blocks()
    n = ctx.num_pairs

    def invertible(block):
        return block.shape[0] == 0 or abs(np.linalg.det(block[:, :, 0])) > 1e-12

    d_form = a_form = None
    if invertible(d):
        if d.shape[0] == 0:
            d_form = even_det(a, ctx)
        else:
            dinv = _inverse_data(d, n)
            schur = a - _grassmann_matmul(_grassmann_matmul(b, dinv, n), c, n)
            d_form = even_det(schur, ctx) * even_det(dinv, ctx)
    if invertible(a):
        if a.shape[0] == 0:
            a_form = even_det(d, ctx).inverse() if d.shape[0] else ctx.one()
        else:
            ainv = _inverse_data(a, n)
            schur = d - _grassmann_matmul(_grassmann_matmul(c, ainv, n), b, n)
            sdet = even_det(schur, ctx)
            if sdet.body != 0:
                a_form = even_det(a, ctx) * sdet.inverse()
    return d_form, a_form


def berezinian(m: Supermatrix, tol: float = 1e-9) -> Supernumber:
    d_form, a_form = berezinian_both(m)
    if d_form is None and a_form is None:
        raise SingularError("no Berezinian: A or D block is singular")
    if d_form is not None and a_form is not None:
        if (d_form - a_form).max_abs() > tol * max(1.0, d_form.max_abs()):
            raise SupermatrixError(f"Berezinian forms disagree: {d_form} vs {a_form}")
    return d_form if d_form is not None else a_form


def expm(m: Supermatrix, max_terms: int = 200) -> Supermatrix:
    """Scaling and squaring with a Taylor series.

    The body is scaled by 2^-s so its norm is at most 0.5; the series runs until
    a term falls below 1e-16 (soul-only terms vanish exactly by nilpotency).
    """
    _require_square_even(m, "expm")
    n = m.ctx.num_pairs
    body_norm = np.linalg.norm(m.data[:, :, 0], ord=np.inf) if m.nrows else 0.0
    s = 0
    if body_norm > 0.5:
        s = int(math.ceil(math.log2(body_norm / 0.5)))
    x = m.data / (2 ** s)
    dim = m.nrows
    total = np.zeros_like(x)
    total[:, :, 0] = np.eye(dim)
    term = total.copy()
    for k in range(1, max_terms + 1):
        term = _grassmann_matmul(term, x, n) / k
        if not term.any():
            break
        total = total + term
        if np.abs(term).max() < 1e-16:
            break
    for _ in range(s):
        total = _grassmann_matmul(total, total, n)
    return m._like(total)


# -- text and JSON formats ----------------------------------------------------------


def _shape_header(m: Supermatrix) -> str:
    (p, q), (r, s) = m.shape
    head = f"({p}|{q})x({r}|{s}) pairs={m.ctx.num_pairs}"
    if not m.is_canonical():
        head += " rowgrades=" + "".join(map(str, m.row_parity))
        head += " colgrades=" + "".join(map(str, m.col_parity))
    return head


def format_matrix(m: Supermatrix) -> str:
    lines = [_shape_header(m)]
    for i in range(m.nrows):
        lines.append(", ".join(format_supernumber(m.entry(i, j)) for j in range(m.ncols)))
    return "\n".join(lines) + "\n"


def _parse_header(line: str):
    mt = re.match(r"\s*\((\d+)\|(\d+)\)x\((\d+)\|(\d+)\)(.*)$", line)
    if not mt:
        raise SupermatrixError(f"bad matrix header {line!r}")
    p, q, r, s = map(int, mt.groups()[:4])
    opts = dict(kv.split("=", 1) for kv in mt.group(5).split())
    rows = _parity_array([int(c) for c in opts["rowgrades"]]) if "rowgrades" in opts \
        else _parity_array((p, q))
    cols = _parity_array([int(c) for c in opts["colgrades"]]) if "colgrades" in opts \
        else _parity_array((r, s))
    pairs = int(opts["pairs"]) if "pairs" in opts else None
    return rows, cols, pairs


def parse_matrix(text: str, ctx: AlgebraContext | None = None) -> Supermatrix:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("%")]
    if not lines:
        raise SupermatrixError("empty matrix text")
    rows, cols, pairs = _parse_header(lines[0])
    body_lines = lines[1:]
    if len(body_lines) != len(rows):
        raise SupermatrixError(f"expected {len(rows)} rows, found {len(body_lines)}")
    if ctx is None:
        needed = max((max_generator_pair(ln) for ln in body_lines), default=0)
        ctx = AlgebraContext(max(pairs or 0, needed))
    cells = []
    for ln in body_lines:
        parts = [c.strip() for c in ln.split(",")]
        if len(parts) != len(cols):
            raise SupermatrixError(f"row {ln!r} has {len(parts)} entries, expected {len(cols)}")
        cells.append([parse_supernumber(c, ctx) for c in parts])
    return Supermatrix.from_entries(ctx, rows, cols, cells)


def matrix_to_json(m: Supermatrix) -> dict:
    (p, q), (r, s) = m.shape
    return {
        "shape": [[p, q], [r, s]],
        "pairs": m.ctx.num_pairs,
        "row_grades": m.row_parity.tolist(),
        "col_grades": m.col_parity.tolist(),
        "entries": [[format_supernumber(m.entry(i, j)) for j in range(m.ncols)]
                    for i in range(m.nrows)],
    }


def matrix_from_json(obj) -> Supermatrix:
    if isinstance(obj, str):
        obj = json.loads(obj)
    ctx = AlgebraContext(obj["pairs"])
    cells = [[parse_supernumber(c, ctx) for c in row] for row in obj["entries"]]
    return Supermatrix.from_entries(ctx, obj["row_grades"], obj["col_grades"], cells)
