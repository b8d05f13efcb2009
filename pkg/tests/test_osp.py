import itertools

import numpy as np
import pytest

from superqubits.grassmann import AlgebraContext
from superqubits.osp import (
    FormConvention,
    OspError,
    basis_from_form,
    body_structure,
    build_forms,
    build_generators,
    check_algebra_element,
    check_closure,
    check_group_element,
    check_jacobi,
    envelope_element,
    module_action,
    random_uosp_element,
    tensor_module_action,
    uosp_element,
    uosp_real_basis,
)
from superqubits.supermatrix import Supermatrix, expm
from superqubits.superqubit import BasisPermutation, local_basis, local_embed, tensor_labels

CONVENTIONS = [
    FormConvention(p, q, variant, layout)
    for p, q in ((0, 1), (1, 1), (1, 2), (2, 1), (2, 2))
    for variant in ("so_first", "sp_first")
    for layout in ("identity", "split", "paper54")
    if not (layout == "paper54" and p % 2)
]


def _id(conv):
    return f"{conv.p}{conv.q}-{conv.variant}-{conv.eta_layout}"


def test_convention_validation():
    with pytest.raises(OspError):
        FormConvention(1, 1, "weird")
    with pytest.raises(OspError):
        FormConvention(1, 1, eta_layout="nope")
    with pytest.raises(OspError):
        FormConvention(-1, 1)
    with pytest.raises(OspError):
        FormConvention(1, 1, eta_layout="paper54")


@pytest.mark.parametrize("conv", CONVENTIONS, ids=_id)
def test_forms(conv):
    eta, om, G = build_forms(conv)
    e, o = eta.body().real, om.body().real
    assert np.array_equal(e, e.T) and np.array_equal(e @ e, np.eye(len(e)))
    assert np.array_equal(o, -o.T) and np.array_equal(o @ o, -np.eye(len(o)))
    assert G.is_canonical()
    n_even = 2 * conv.p + 1 if conv.variant == "so_first" else 2 * conv.q
    assert int((G.row_parity == 0).sum()) == n_even


@pytest.mark.parametrize("conv", CONVENTIONS, ids=_id)
def test_generators_lie_in_algebra_and_count(conv):
    basis = build_generators(conv)
    p, q = conv.p, conv.q
    assert basis.counts() == {"orthogonal": p * (2 * p + 1), "symplectic": q * (2 * q + 1),
                              "odd": (2 * p + 1) * 2 * q}
    G = basis.G
    for key, t in basis.generators.items():
        assert (t.st @ G + G @ t).max_abs() == 0, key


@pytest.mark.parametrize("conv", [c for c in CONVENTIONS if c.p + c.q <= 3], ids=_id)
def test_closure_exact(conv):
    assert check_closure(build_generators(conv)) == []


@pytest.mark.parametrize("variant", ["so_first", "sp_first"])
def test_jacobi_exact_small(variant):
    assert check_jacobi(build_generators(FormConvention(0, 1, variant))) == []


def test_graded_symmetry_of_generators():
    basis = build_generators(FormConvention(1, 1))
    for x1, x2 in itertools.permutations(range(basis.dim), 2):
        assert basis.generator(x2, x1) == basis.generator(x1, x2) * basis.sign(x1, x2)


def test_basis_from_form_detects_variant():
    G = build_forms(FormConvention(1, 1, "sp_first"))[2]
    assert basis_from_form(G).variant == "sp_first"
    with pytest.raises(OspError):
        basis_from_form(Supermatrix.from_body(AlgebraContext(0), [0, 1], [0, 1], 0.5 * np.eye(2)))


@pytest.mark.parametrize("conv", [FormConvention(1, 1), FormConvention(2, 1, "sp_first", "split"),
                                  FormConvention(2, 2, "so_first", "paper54")], ids=_id)
def test_random_uosp_elements_and_group(conv):
    ctx = AlgebraContext(2)
    basis = build_generators(conv, ctx)
    rng = np.random.default_rng(3)
    for _ in range(5):
        x = random_uosp_element(basis, rng)
        assert check_algebra_element(x, basis.G, 1e-12).passed
        assert check_group_element(expm(x), basis.G).passed


def test_commutator_closes_in_envelope():
    ctx = AlgebraContext(2)
    basis = build_generators(FormConvention(1, 1), ctx)
    rng = np.random.default_rng(4)
    x, y = (random_uosp_element(basis, rng) for _ in range(2))
    assert check_algebra_element(x @ y - y @ x, basis.G, 1e-12).passed


def test_uosp_element_rejects_wrong_parity():
    ctx = AlgebraContext(1)
    basis = build_generators(FormConvention(0, 1), ctx)
    odd_key = next(k for k in basis.generators if basis.grade(*k))
    even_key = next(k for k in basis.generators if not basis.grade(*k))
    with pytest.raises(OspError):
        uosp_element(basis, {odd_key: ctx.one()})
    with pytest.raises(OspError):
        uosp_element(basis, {even_key: ctx.theta(1)})
    with pytest.raises(OspError):
        envelope_element(basis, {odd_key: ctx.one()})


def test_body_structure_of_random_elements():
    ctx = AlgebraContext(1)
    basis = build_generators(FormConvention(1, 2), ctx)
    rng = np.random.default_rng(8)
    for _ in range(5):
        s = body_structure(random_uosp_element(basis, rng))
        assert s.ok, s.violations
    bad = Supermatrix.from_body(ctx, basis.parity, basis.parity, np.ones((7, 7)))
    assert not body_structure(bad).ok


def test_real_spanning_set_is_body_only_and_in_algebra():
    basis = build_generators(FormConvention(1, 1))
    elems = uosp_real_basis(basis)
    assert elems
    for x in elems:
        assert check_algebra_element(x, basis.G, 1e-12).passed
    rank = np.linalg.matrix_rank(np.array([np.concatenate([x.body().real.ravel(), x.body().imag.ravel()])
                                           for x in elems]))
    # so(3) + usp(2)
    assert rank == 3 + 3


def test_module_action_matches_matrix():
    basis = build_generators(FormConvention(1, 1))
    rng = np.random.default_rng(0)
    a = rng.normal(size=(basis.dim, 1)) + 0j
    for key, t in basis.generators.items():
        assert np.allclose(module_action(basis, key, a)[:, 0], t.body() @ a[:, 0])


@pytest.mark.parametrize("n", [2, 3])
def test_tensor_module_action_matches_koszul_embedding(n):
    basis = local_basis()
    perm = BasisPermutation.for_n(n)
    d = 3 ** n
    for key, t in basis.generators.items():
        for slot in range(n):
            emb = perm.to_tensor(local_embed(slot, t, n, check=False, convention="koszul")).body()
            for col in range(d):
                a = np.zeros(d, dtype=complex)
                a[col] = 1
                got = tensor_module_action(basis, key, slot, a.reshape((3,) * n + (1,)), n)
                assert np.allclose(got.reshape(-1), emb[:, col]), (key, slot, tensor_labels(n)[col])
