import json

import numpy as np
import pytest

from superqubits.grassmann import AlgebraContext, Parity, Supernumber
from superqubits.supermatrix import (
    SingularError,
    Supermatrix,
    SupermatrixError,
    berezinian,
    berezinian_both,
    direct_sum,
    expm,
    format_matrix,
    graded_tensor,
    inverse,
    matrix_from_json,
    matrix_to_json,
    parse_matrix,
    superbracket,
    tensor_power,
)

from conftest import random_homogeneous, random_parities

CTX = AlgebraContext(2)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def _pair(rng, grades=None):
    r, k, c = (random_parities(rng) for _ in range(3))
    gm, gn = grades if grades else (int(x) for x in rng.integers(0, 2, 2))
    return random_homogeneous(rng, CTX, r, k, gm), random_homogeneous(rng, CTX, k, c, gn), gm, gn


def test_constructors_and_shape():
    eye = Supermatrix.identity(CTX, [0, 0, 1])
    assert eye.shape == ((2, 1), (2, 1))
    assert eye.grade() is Parity.EVEN
    z = Supermatrix.zeros(CTX, [0, 1], [1])
    assert z.shape == ((1, 1), (0, 1)) and z.grade() is Parity.ZERO
    t = CTX.theta(1)
    odd = Supermatrix.from_entries(CTX, [0, 1], [0, 1], [[t, 1], [1, t]])
    assert odd.grade() is Parity.ODD
    with pytest.raises(SupermatrixError):
        Supermatrix.from_entries(CTX, [0, 1], [0, 1], [[t, 1], [1, t]], grade=0)


def test_immutable():
    eye = Supermatrix.identity(CTX, [0, 1])
    with pytest.raises(AttributeError):
        eye.data = None
    with pytest.raises(ValueError):
        eye.data[0, 0, 0] = 2


def test_matmul_parity_mismatch():
    a = Supermatrix.identity(CTX, [0, 1])
    b = Supermatrix.identity(CTX, [1, 1])
    with pytest.raises(SupermatrixError):
        a @ b


def test_supertranspose_squares_to_parity_sign(rng):
    for _ in range(20):
        r, c = random_parities(rng), random_parities(rng)
        m = random_homogeneous(rng, CTX, r, c, 0)
        sign = (-1) ** ((np.array(r)[:, None] + np.array(c)[None, :]) % 2)
        assert np.array_equal(m.st.st.data, m.data * sign[:, :, None])


def test_supertranspose_of_even_block_matrix():
    # body-level check: even (1|1) matrix [[a, b], [c, d]] -> [[a, c], [-b, d]]
    t = CTX.theta(1)
    a, b, c, d = CTX.scalar(2), t, t * 3, CTX.scalar(5)
    m = Supermatrix.from_entries(CTX, [0, 1], [0, 1], [[a, b], [c, d]])
    want = Supermatrix.from_entries(CTX, [0, 1], [0, 1], [[a, c], [-b, d]])
    assert m.st == want


def test_product_laws(rng):
    for _ in range(60):
        m, n, gm, gn = _pair(rng)
        sign = -1 if gm and gn else 1
        assert (m @ n).st == (n.st @ m.st) * sign
        assert (m @ n).superadjoint() == (n.superadjoint() @ m.superadjoint()) * sign
        assert m.st.st.st.st == m
        assert m.superadjoint().superadjoint() == m * (-1) ** gm


def test_left_scalar_rule(rng):
    t1, t2 = CTX.theta(1), CTX.theta(2)
    for _ in range(30):
        m, n, gm, gn = _pair(rng)
        for alpha in (t1 * 2, t1 * t2 + 3, CTX.theta(2, star=True)):
            assert (alpha * m) @ n == alpha * (m @ n)
            assert alpha * (t2 * m) == (alpha * t2) * m


def test_superbracket_graded_antisymmetry(rng):
    for _ in range(30):
        r = random_parities(rng)
        gm, gn = (int(x) for x in rng.integers(0, 2, 2))
        m = random_homogeneous(rng, CTX, r, r, gm)
        n = random_homogeneous(rng, CTX, r, r, gn)
        assert superbracket(m, n) == superbracket(n, m) * (-1 if gm and gn else 1) * -1


def test_graded_tensor_product_rule(rng):
    for _ in range(30):
        m1, m2, g1, _ = _pair(rng)
        n1, n2, h1, _ = _pair(rng)
        sign = -1 if h1 and (m2.grade() is Parity.ODD) else 1
        lhs = graded_tensor(m1, n1) @ graded_tensor(m2, n2)
        assert lhs == graded_tensor(m1 @ m2, n1 @ n2) * sign


def test_tensor_power_dims():
    eye = Supermatrix.identity(CTX, [0, 0, 1])
    p3 = tensor_power(eye, 3)
    assert p3.nrows == 27
    assert int((p3.row_parity == 0).sum()) == 14
    assert p3 == Supermatrix.identity(CTX, p3.row_parity)


def test_direct_sum_canonical():
    a = Supermatrix.identity(CTX, [0, 1]) * 2
    b = Supermatrix.identity(CTX, [0, 1]) * 3
    s = direct_sum(a, b)
    assert s.row_parity.tolist() == [0, 0, 1, 1]
    assert np.allclose(np.diag(s.body()), [2, 3, 2, 3])


def test_inverse_examples():
    eye = Supermatrix.identity(CTX, [0, 1, 1])
    assert inverse(eye) == eye
    t1, t2 = CTX.theta(1), CTX.theta(2)
    z = CTX.zero()
    nil = Supermatrix.from_entries(CTX, [0, 1, 1], [0, 1, 1],
                                   [[z, t1, z], [t2, z, z], [z, z, t1 * t2]])
    m = eye + nil
    series = eye - nil + nil @ nil - nil @ nil @ nil + nil @ nil @ nil @ nil
    assert inverse(m) == series
    assert m @ inverse(m) == eye
    with pytest.raises(SupermatrixError):
        inverse(Supermatrix.zeros(CTX, [0, 1]))


def test_berezinian_examples():
    body = Supermatrix.from_body(CTX, [0, 0, 1], [0, 0, 1], np.diag([2.0, 3.0, 4.0]))
    assert abs(berezinian(body).body - 1.5) < 1e-15
    assert berezinian(body).soul().is_zero()
    # body-singular D: only the A-form exists and is used
    t = CTX.theta(1)
    m = Supermatrix.from_entries(CTX, [0, 1], [0, 1], [[CTX.one(), t], [t, t * CTX.theta(2)]])
    assert berezinian_both(m) == (None, None)
    with pytest.raises(SingularError):
        berezinian(m)
    with pytest.raises(SupermatrixError):
        berezinian(Supermatrix.zeros(CTX, [0, 1]))


def test_berezinian_of_exponential_is_exp_supertrace(rng):
    par = np.array([0, 0, 1, 1])
    for _ in range(10):
        x = random_homogeneous(rng, CTX, par, par, 0) * 0.1
        ev, od = par == 0, par == 1
        strace = x.data[ev, ev].sum(axis=0) - x.data[od, od].sum(axis=0)
        want = Supernumber.from_array(CTX, strace).exp()
        assert (berezinian(expm(x)) - want).max_abs() < 1e-10


def test_expm_body_matches_eigendecomposition(rng):
    h = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    h = h + h.conj().T
    h[:2, 2] = h[2, :2] = 0
    w, v = np.linalg.eigh(h)
    want = v @ np.diag(np.exp(1j * w)) @ v.conj().T
    x = Supermatrix.from_body(CTX, [0, 0, 1], [0, 0, 1], 1j * h)
    assert np.abs(expm(x).body() - want).max() < 1e-12


def test_expm_nilpotent_is_exact():
    t1, t2 = CTX.theta(1), CTX.theta(2)
    z = CTX.zero()
    nil = Supermatrix.from_entries(CTX, [0, 1], [0, 1], [[z, t1], [t2, z]])
    eye = Supermatrix.identity(CTX, [0, 1])
    assert expm(nil) == eye + nil + (nil @ nil) * 0.5


def test_expm_inverse_pair(rng):
    par = [0, 0, 1]
    x = random_homogeneous(rng, CTX, par, par, 0) * 0.4
    eye = Supermatrix.identity(CTX, par)
    assert (expm(x) @ expm(x * -1) - eye).max_abs() < 1e-11


def test_text_and_json_roundtrip(rng):
    m = random_homogeneous(rng, CTX, [0, 1, 1], [0, 0, 1], 1)
    text = format_matrix(m)
    assert text.splitlines()[0].startswith("(1|2)x(2|1)")
    assert parse_matrix("% comment\n" + text, CTX) == m
    back = matrix_from_json(json.dumps(matrix_to_json(m)))
    assert back == m


def test_parse_matrix_errors():
    with pytest.raises(SupermatrixError):
        parse_matrix("")
    with pytest.raises(SupermatrixError):
        parse_matrix("(1|1)x(1|1) pairs=1\n1, 0\n0")


def test_singular_error_is_supermatrix_error():
    assert issubclass(SingularError, SupermatrixError)
