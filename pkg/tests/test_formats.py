from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from forensic_codes.codec2d import derive_params_2d
from forensic_codes.codec3d import derive_params_3d
from forensic_codes.errors import GridFormatError, ParameterError
from forensic_codes.formats import (
    message_from_hex,
    message_to_hex,
    params_from_doc,
    params_to_doc,
    parse_doc,
)
from forensic_codes.robust import RobustParams, validate_params_robust


def test_hex_examples():
    assert message_to_hex([1, 0, 1], 2) == "3:a0"
    assert message_to_hex([], 2) == "0:"
    assert message_to_hex([0] * 9, 2) == "9:0000"
    assert message_to_hex([2, 0, 1], 3) == "3:020001"
    np.testing.assert_array_equal(message_from_hex("3:a0\n", 2), [1, 0, 1])


@given(st.lists(st.integers(0, 1), max_size=80))
def test_binary_hex_round_trip(bits):
    np.testing.assert_array_equal(message_from_hex(message_to_hex(bits, 2), 2), bits)


@given(st.integers(3, 7), st.data())
def test_qary_hex_round_trip(q, data):
    msg = data.draw(st.lists(st.integers(0, q - 1), max_size=30))
    np.testing.assert_array_equal(message_from_hex(message_to_hex(msg, q), q), msg)


@pytest.mark.parametrize("text,q", [
    ("a0", 2), ("x:a0", 2), ("3:zz", 2), ("3:a000", 2), ("3:a1", 2), ("2:00", 3),
    ("2:0003", 3),
])
def test_hex_rejects_malformed(text, q):
    with pytest.raises(GridFormatError):
        message_from_hex(text, q)


def test_parse_doc_skips_comments_and_rejects_junk():
    assert parse_doc("# hi\n\nq = 2\nM=9\n") == {"q": "2", "M": "9"}
    with pytest.raises(GridFormatError):
        parse_doc("q 2\n")


@pytest.mark.parametrize("p", [
    derive_params_2d(2, 1024, 14),
    derive_params_2d(3, 5000, 11, n=512),
    derive_params_3d(2, 209935, 11),
    validate_params_robust(derive_params_2d(2, 3375, 20), 2),
])
def test_params_round_trip(p):
    assert params_from_doc(params_to_doc(p)) == p


def test_robust_doc_reports_both_lengths():
    rp = validate_params_robust(derive_params_2d(2, 3375, 20), 2)
    doc = parse_doc(params_to_doc(rp))
    assert doc["kind"] == "robust"
    assert (doc["delta"], doc["L"], doc["k_robust"]) == ("2", "25", "9")
    assert int(doc["k"]) == rp.base.k


def test_minimal_doc_is_enough():
    p = params_from_doc("q=2\nM=1024\nh=14\n")
    assert (p.d, p.m) == (5, 8)
    rp = params_from_doc("kind=robust\nq=2\nM=3375\nh=20\ndelta=2\n")
    assert isinstance(rp, RobustParams) and rp.k == 9


def test_doc_inconsistencies_rejected():
    with pytest.raises(GridFormatError):
        params_from_doc("q=2\nM=1024\nh=14\nd=6\n")
    with pytest.raises(GridFormatError):
        params_from_doc("kind=4d\nq=2\nM=1024\nh=14\n")
    with pytest.raises(GridFormatError):
        params_from_doc("q=2\nM=lots\nh=14\n")
    with pytest.raises(GridFormatError):
        params_from_doc("kind=robust\nq=2\nM=3375\nh=20\n")
    with pytest.raises(ParameterError):
        params_from_doc("q=2\nM=10\nh=100\n")
