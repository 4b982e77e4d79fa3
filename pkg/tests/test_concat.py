import itertools
import math

import numpy as np
import pytest

from models.coding import QaryCode, greedy_gv_code, repetition_code
from models.concat import (
    ConcatenationSpec,
    brute_density_check,
    build,
    construction_report,
    load_spec,
    measure,
    triangular_basis,
    validate,
    verify,
)
from models.eisenstein import EisensteinInt, split_prime
from models.lattice import IntegerLattice, augment, complexify, root_lattice_A, scale_by
from utils.errors import CapExceededError, DegenerateLatticeError, InvalidArgumentError, SpecFileError

Z1 = IntegerLattice.from_rows([[1]])
Z3 = IntegerLattice.from_rows([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
Z4 = IntegerLattice.from_rows([[1 if i == j else 0 for j in range(4)] for i in range(4)])

CORPUS = [
    "q4_z4_l1.spec",
    "q3_z3_l1.spec",
    "q3_z3_l2.spec",
    "q4_z2_l0.spec",
    "q3_a2_augmented_l0.spec",
    "q3_z4_greedy_l1.spec",
]


def q4_spec(code=None):
    return ConcatenationSpec(info=split_prime(2), ell=1, codes=(code or repetition_code(4, 4),), base=Z4)


def test_validate_empty_concatenation():
    assert validate(ConcatenationSpec(split_prime(2), 0, (), Z4)) == []


def test_validate_repetition_code():
    assert validate(q4_spec()) == []


def test_validate_reports_short_distance():
    weak = QaryCode.from_words(4, [(0, 0, 0, 0), (1, 1, 1, 0)])
    violations = validate(q4_spec(weak))
    assert len(violations) == 1
    assert violations[0].code_index == 0
    assert "d_H 3 < 4" in str(violations[0])


def test_validate_reports_missing_zero_and_alphabet():
    no_zero = QaryCode.from_words(4, [(1, 1, 1, 1), (2, 2, 2, 2)])
    assert any("zero codeword" in v.message for v in validate(q4_spec(no_zero)))
    wrong_q = repetition_code(4, 3)
    assert any("alphabet" in v.message for v in validate(q4_spec(wrong_q)))
    wrong_count = ConcatenationSpec(split_prime(2), 2, (repetition_code(4, 4),), Z4)
    assert validate(wrong_count)[0].code_index is None


def test_build_without_codes_is_base_packing():
    spec = ConcatenationSpec(split_prime(2), 0, (), Z3)
    pkg = build(spec)
    base = complexify(Z3)
    assert pkg.points_per_cell == 1
    assert math.isclose(pkg.packing.det, base.det)
    assert math.isclose(pkg.lambda_lower, pkg.base_metrics.exponent)


def test_build_q4_example():
    pkg = build(q4_spec())
    assert pkg.points_per_cell == 4
    assert math.isclose(pkg.packing.period_det, 4 ** 4 * complexify(Z4).det)
    measured = measure(pkg)
    assert measured.certified
    assert math.isclose(measured.squared_distance, 4.0)
    assert math.isclose(pkg.lambda_lower, pkg.base_metrics.exponent + 2 / 8)


def test_build_q3_example():
    pkg = build(ConcatenationSpec(split_prime(3), 1, (repetition_code(3, 3),), Z3))
    assert pkg.points_per_cell == 3
    assert measure(pkg).squared_distance >= 3 - 1e-9


def test_build_rejects_invalid_and_oversized():
    weak = QaryCode.from_words(4, [(0, 0, 0, 0), (1, 1, 1, 0)])
    with pytest.raises(InvalidArgumentError):
        build(q4_spec(weak))
    with pytest.raises(CapExceededError):
        build(q4_spec(), cap=3)


def test_levels_grow_det_by_q_to_the_n():
    info = split_prime(3)
    one = build(ConcatenationSpec(info, 1, (repetition_code(3, 3),), Z3))
    two = build(ConcatenationSpec(info, 2, (QaryCode.from_words(3, [(0, 0, 0)]), repetition_code(3, 3)), Z3))
    assert math.isclose(two.packing.period_det, 3 ** 3 * one.packing.period_det)
    # a one-word code adds nothing to the point count
    assert math.isclose(two.lambda_lower, one.lambda_lower)
    assert two.required_squared_distance == 9


@pytest.mark.parametrize("name", CORPUS)
def test_corpus_oracle(spec_dir, name):
    spec = load_spec(spec_dir / name)
    pkg = build(spec)
    assert pkg.points_per_cell == math.prod(spec.sizes)
    measured = verify(pkg)
    assert measured.squared_distance >= spec.Q ** spec.ell * pkg.base_squared_distance - 1e-9
    assert measured.exponent >= pkg.lambda_lower - 1e-9
    report = construction_report(pkg, measured)
    assert report["M_list"] == spec.sizes
    assert report["d_E2_measured"] == measured.squared_distance


def test_density_check_unit_lattice():
    check = brute_density_check(IntegerLattice.from_rows([[1, 0], [0, 1]]), 10)
    assert check.count == 400
    assert abs(check.measured - 1.0) <= 0.2


def test_density_check_hexagonal():
    check = brute_density_check(complexify(Z1), 10)
    assert check.relative_error <= 0.1
    assert math.isclose(check.expected, 2 / math.sqrt(3))


def test_density_check_concatenation():
    pkg = build(ConcatenationSpec(split_prime(3), 1, (repetition_code(3, 3),), Z3))
    check = brute_density_check(pkg, 6)
    assert math.isclose(check.expected, 3 / pkg.packing.period_det)
    assert check.passed


def test_density_check_augmented_lattice():
    check = brute_density_check(augment(root_lattice_A(3), 3), 8)
    assert math.isclose(check.expected, 1 / 3)
    assert check.passed


def test_density_check_q4_example_window_six(spec_dir):
    pkg = build(load_spec(spec_dir / "q4_z4_l1.spec"))
    check = brute_density_check(pkg, 6)
    assert math.isclose(check.expected, 4 / pkg.packing.period_det)
    assert check.passed


def _count_by_coefficients(packing, window, radius):
    ranges = [range(-radius, radius + 1)] * packing.basis.shape[0]
    count = 0
    for c in itertools.product(*ranges):
        point = np.array(c) @ packing.basis
        count += bool(np.all((point >= -window) & (point < window)))
    return count


@pytest.mark.parametrize("packing,window", [
    (complexify(Z1), 3),
    (scale_by(EisensteinInt(1, -1), complexify(Z1)), 4),
    (scale_by(EisensteinInt(2, 0), complexify(Z1)), 5),
])
def test_density_count_matches_coefficient_scan(packing, window):
    assert brute_density_check(packing, window).count == _count_by_coefficients(packing, window, 12)


def test_triangular_basis():
    W = triangular_basis([[1, 2], [-1, 3]])
    assert W[1, 0] == 0
    assert W[0, 0] > 0 and W[1, 1] > 0
    assert W[0, 0] * W[1, 1] == 5
    with pytest.raises(DegenerateLatticeError):
        triangular_basis([[1, 2], [2, 4]])


def test_load_spec_errors(tmp_path):
    missing = tmp_path / "missing.spec"
    with pytest.raises(SpecFileError):
        load_spec(missing)
    bad = tmp_path / "bad.spec"
    bad.write_text("prime 4\nell 0\nbasis\n1\n")
    with pytest.raises(SpecFileError):
        load_spec(bad)
    dependent = tmp_path / "dependent.spec"
    dependent.write_text("prime 2\nell 0\nbasis\n1 1\n2 2\n")
    with pytest.raises(SpecFileError):
        load_spec(dependent)
    stray = tmp_path / "stray.spec"
    stray.write_text("prime 2\n1 0\n")
    with pytest.raises(SpecFileError):
        load_spec(stray)


def test_greedy_code_spec(spec_dir):
    spec = load_spec(spec_dir / "q3_z4_greedy_l1.spec")
    assert spec.codes[0].codewords == greedy_gv_code(4, 3, 3).codewords
    pkg = build(spec)
    assert pkg.points_per_cell == 9
    measured = verify(pkg)
    assert math.isclose(measured.squared_distance, 3.0)
    assert math.isclose(measured.exponent, pkg.lambda_lower, abs_tol=1e-9)
