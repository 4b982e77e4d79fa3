import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from models.coding import (
    QaryCode,
    clipped_entropy,
    entropy,
    entropy_array,
    gv_rate,
    gv_size_bound,
    greedy_gv_code,
    hamming_size_bound,
    load_code,
    repetition_code,
    save_code,
)
from utils.errors import BoundDomainError, CapExceededError, InvalidArgumentError, SpecFileError
from utils.numerics import ExtendedNumerics


def direct_entropy(Q, rho):
    return (rho * math.log(Q - 1, Q) - rho * math.log(rho, Q)
            - (1 - rho) * math.log(1 - rho, Q))


def brute_min_distance(code):
    words = code.codewords
    return min(sum(a != b for a, b in zip(u, v))
               for i, u in enumerate(words) for v in words[i + 1:])


def test_entropy_examples():
    assert math.isclose(entropy(2, 0.5), 1.0)
    for Q in (3, 4, 9):
        assert math.isclose(entropy(Q, (Q - 1) / Q), 1.0, rel_tol=1e-14)
    assert math.isclose(entropy(4, 0.25), direct_entropy(4, 0.25), abs_tol=1e-12)
    assert math.isclose(entropy(4, 0.25), 1 - gv_rate(4, 0.25), abs_tol=1e-15)


def test_entropy_endpoints():
    assert entropy(4, 0) == 0
    assert math.isclose(entropy(4, 1), math.log(3, 4))
    assert entropy(2, 1) == 0


@pytest.mark.parametrize("rho", [-0.1, 1.5])
def test_entropy_rejects_out_of_range(rho):
    with pytest.raises(InvalidArgumentError):
        entropy(4, rho)


def test_entropy_extended_precision():
    numerics = ExtendedNumerics(40)
    with numerics.context():
        value = entropy(4, Fraction(1, 4), numerics)
    assert abs(float(value) - direct_entropy(4, 0.25)) < 1e-14


@pytest.mark.parametrize("Q", [2, 3, 4, 25])
def test_entropy_monotone(Q):
    peak = (Q - 1) / Q
    rising = [entropy(Q, peak * k / 1000) for k in range(1001)]
    falling = [entropy(Q, peak + (1 - peak) * k / 1000) for k in range(1001)]
    assert all(a < b for a, b in zip(rising, rising[1:]))
    assert all(a > b for a, b in zip(falling, falling[1:]))


def test_entropy_array_matches_scalar():
    rhos = np.array([1e-300, 1e-12, 0.01, 0.3049, 0.7])
    values = entropy_array(4, np.log2(rhos))
    for rho, value in zip(rhos, values):
        assert math.isclose(value, entropy(4, float(rho)), rel_tol=1e-12, abs_tol=1e-300)


def test_clipped_entropy():
    assert clipped_entropy(4, 1) == 1
    assert clipped_entropy(4, 0.75) == 1
    assert clipped_entropy(4, 1 / 16) == entropy(4, 1 / 16)


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_clipped_entropy_dominates(rho):
    clipped = clipped_entropy(4, rho)
    plain = entropy(4, rho)
    assert clipped >= plain - 1e-15
    if rho < 0.75:
        assert clipped == plain
    else:
        assert clipped > plain or math.isclose(clipped, plain)


def test_gv_rate():
    assert math.isclose(gv_rate(4, 1e-12), 1.0, abs_tol=1e-10)
    assert gv_rate(4, 0.75 - 1e-9) < 1e-8
    assert math.isclose(gv_rate(4, 0.3049), 1 - direct_entropy(4, 0.3049), abs_tol=1e-12)
    for rho in (0, 0.75, 0.9):
        with pytest.raises(BoundDomainError):
            gv_rate(4, rho)


def test_repetition_code():
    code = repetition_code(3, 2)
    assert code.codewords == ((0, 0, 0), (1, 1, 1))
    assert code.min_distance == 3
    four = repetition_code(4, 4)
    assert four.size == 4 and four.min_distance == 4 and four.contains_zero
    full = repetition_code(1, 5)
    assert full.size == 5 and full.min_distance == 1


def test_code_properties():
    code = repetition_code(4, 4)
    assert math.isclose(code.rate, 0.25)
    assert code.relative_distance == 1.0
    single = QaryCode.from_words(3, [(0, 0, 0)])
    assert single.min_distance is None
    assert single.relative_distance is None
    assert single.rate == 0


def test_code_validation():
    with pytest.raises(InvalidArgumentError):
        QaryCode.from_words(2, [(0, 1), (0, 1)])
    with pytest.raises(InvalidArgumentError):
        QaryCode.from_words(2, [(0, 2)])
    with pytest.raises(InvalidArgumentError):
        QaryCode.from_words(2, [(0, 1), (0, 1, 1)])


def test_greedy_examples():
    code = greedy_gv_code(3, 2, 3)
    assert {(0, 0, 0), (1, 1, 1)} <= set(code.codewords)
    assert code.size >= 2
    full = greedy_gv_code(3, 3, 1)
    assert full.size == 27
    four = greedy_gv_code(4, 4, 4)
    assert four.size >= 4
    assert four.min_distance >= 4
    assert set(repetition_code(4, 4).codewords) <= set(four.codewords)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(min_value=1, max_value=5), Q=st.integers(min_value=2, max_value=4), data=st.data())
def test_greedy_meets_gv_bound(n, Q, data):
    d = data.draw(st.integers(min_value=1, max_value=n))
    code = greedy_gv_code(n, Q, d)
    assert code.contains_zero
    assert gv_size_bound(n, Q, d) <= code.size <= hamming_size_bound(n, Q, d)
    if code.size > 1:
        assert code.min_distance >= d
        assert code.min_distance == brute_min_distance(code)


def _lexicode(n, Q, d):
    chosen = []
    for word in itertools.product(range(Q), repeat=n):
        if all(sum(a != b for a, b in zip(word, kept)) >= d for kept in chosen):
            chosen.append(word)
    return tuple(chosen)


@pytest.mark.parametrize("n,Q,d", [(3, 3, 2), (4, 3, 3), (4, 2, 2), (5, 2, 3), (3, 4, 2), (4, 4, 3)])
def test_greedy_matches_pairwise_scan(n, Q, d):
    assert greedy_gv_code(n, Q, d).codewords == _lexicode(n, Q, d)


def test_greedy_small_distances_scale():
    assert greedy_gv_code(7, 4, 1).size == 4 ** 7
    code = greedy_gv_code(8, 4, 2)
    assert gv_size_bound(8, 4, 2) <= code.size <= 4 ** 7
    assert greedy_gv_code(4, 3, 3).size == 9


def test_greedy_rejects_large_spaces():
    with pytest.raises(CapExceededError):
        greedy_gv_code(12, 4, 3)
    with pytest.raises(InvalidArgumentError):
        greedy_gv_code(3, 2, 4)


def test_size_bounds():
    assert gv_size_bound(3, 2, 3) == 2
    assert hamming_size_bound(7, 2, 3) == 16


def test_code_file_roundtrip(tmp_path):
    path = tmp_path / "rep.code"
    save_code(repetition_code(4, 4), path)
    assert path.read_text().splitlines()[0] == "4 4 4 4"
    loaded = load_code(path)
    assert loaded.codewords == repetition_code(4, 4).codewords
    single = tmp_path / "zero.code"
    save_code(QaryCode.from_words(3, [(0, 0, 0)]), single)
    assert single.read_text().splitlines()[0] == "3 3 1 0"


@pytest.mark.parametrize("text", [
    "",
    "3 2 2\n0 0 0\n1 1 1\n",
    "3 2 3 3\n0 0 0\n1 1 1\n",
    "3 2 2 2\n0 0 0\n1 1 1\n",
    "3 2 2 3\n0 0 x\n1 1 1\n",
])
def test_load_code_rejects_malformed(tmp_path, text):
    path = tmp_path / "bad.code"
    path.write_text(text)
    with pytest.raises(SpecFileError):
        load_code(path)


def test_shipped_codes(spec_dir):
    assert load_code(spec_dir / "rep_4_4.code").min_distance == 4
    assert load_code(spec_dir / "zero_3.code").size == 1
