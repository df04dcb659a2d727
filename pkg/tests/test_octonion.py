import re

import numpy as np
from hypothesis import given, strategies as st

from jbstar import octonion
from jbstar.octonion import OCT_TABLE, oct_conj, oct_mul, oct_norm_form, oct_trace


def _docstring_table():
    """Parse the frozen multiplication table printed in the module docstring."""
    lines = octonion.__doc__.splitlines()
    rows = [l for l in lines if re.match(r"\s+e\d\s+-?e\d", l) and len(l.split()) == 9]
    table = np.zeros((8, 8, 8))
    for i, row in enumerate(rows):
        for j, tok in enumerate(row.split()[1:]):
            sign = -1.0 if tok.startswith("-") else 1.0
            table[i, j, int(tok.lstrip("-")[1])] = sign
    return table


def _rand(seed, n=8):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def test_table_matches_frozen_docstring():
    np.testing.assert_array_equal(OCT_TABLE, _docstring_table())


def test_selected_products():
    e = np.eye(8)
    np.testing.assert_array_equal(oct_mul(e[1], e[2]), e[3])
    np.testing.assert_array_equal(oct_mul(e[2], e[1]), -e[3])
    np.testing.assert_array_equal(oct_mul(e[1], e[1]), -e[0])
    np.testing.assert_array_equal(oct_mul(e[4], e[1]), -e[5])


def test_not_associative():
    e = np.eye(8)
    left = oct_mul(oct_mul(e[1], e[2]), e[4])
    right = oct_mul(e[1], oct_mul(e[2], e[4]))
    np.testing.assert_array_equal(left, -right)


@given(st.integers(0, 2**32 - 1))
def test_alternative_laws(seed):
    x, y = _rand(seed), _rand(seed + 1)
    np.testing.assert_allclose(oct_mul(oct_mul(x, x), y), oct_mul(x, oct_mul(x, y)), atol=1e-12)
    np.testing.assert_allclose(oct_mul(oct_mul(y, x), x), oct_mul(y, oct_mul(x, x)), atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_moufang_identity(seed):
    x, y, z = _rand(seed), _rand(seed + 1), _rand(seed + 2)
    left = oct_mul(oct_mul(z, x), oct_mul(y, z))
    right = oct_mul(oct_mul(z, oct_mul(x, y)), z)
    np.testing.assert_allclose(left, right, atol=1e-11)


@given(st.integers(0, 2**32 - 1))
def test_norm_form_is_multiplicative(seed):
    x, y = _rand(seed), _rand(seed + 1)
    np.testing.assert_allclose(oct_norm_form(oct_mul(x, y)), oct_norm_form(x) * oct_norm_form(y), rtol=1e-12)


def test_conjugate_gives_norm_and_trace():
    x = _rand(7)
    np.testing.assert_allclose(oct_mul(x, oct_conj(x)), oct_norm_form(x) * np.eye(8)[0], atol=1e-12)
    np.testing.assert_allclose(x + oct_conj(x), oct_trace(x) * np.eye(8)[0], atol=1e-15)
