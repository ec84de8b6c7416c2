import math

import numpy as np
import pytest

from qmono import (Bipartition, DensityMatrix, MeasureKind, PureState,
                   concurrence_of_assistance, concurrence_pure,
                   concurrence_two_qubit_mixed, eof_pure, eof_two_qubit,
                   haar_random_pure, make_ghz_state, make_w_state, negativity,
                   negativity_pure, random_mixed, reduced_density, register,
                   rng_stream, scren_pure, scren_two_qubit, screnoa_two_qubit,
                   tensor_product, to_density, computational_state)
from qmono.linalg import haar_unitary
from qmono.runs import example1_state

S6 = math.sqrt(6) / 6
SQRT21_OVER_6 = math.sqrt(21) / 6


def bell():
    return PureState(register("A", "B"), np.array([1, 0, 0, 1]) / np.sqrt(2))


def cut_a(state):
    return Bipartition.split(state.register, (state.register.labels[0],))


def test_concurrence_pure_basics():
    assert concurrence_pure(bell(), cut_a(bell())).value == pytest.approx(1.0, abs=1e-12)
    prod = tensor_product(computational_state(register("A"), "0"),
                          computational_state(register("B"), "1"))
    assert concurrence_pure(prod, cut_a(prod)).value == pytest.approx(0.0, abs=1e-12)


def test_concurrence_pure_worked_example():
    psi = example1_state()
    val = concurrence_pure(psi, cut_a(psi)).value
    assert val == pytest.approx(SQRT21_OVER_6, abs=1e-10)


def test_wootters_worked_example_reductions():
    psi = example1_state()
    c_ab = concurrence_two_qubit_mixed(reduced_density(psi, ("A", "B"))).value
    c_ac = concurrence_two_qubit_mixed(reduced_density(psi, ("A", "C"))).value
    assert c_ab == pytest.approx(S6, abs=1e-10)
    assert c_ac == pytest.approx(0.5, abs=1e-10)


def test_wootters_werner_state():
    bell_rho = to_density(bell()).entries
    rho = DensityMatrix(register("A", "B"), 0.5 * bell_rho + 0.5 * np.eye(4) / 4)
    # roof oracle value for p = 1/2 (max(0, (3p-1)/2))
    assert concurrence_two_qubit_mixed(rho).value == pytest.approx(0.25, abs=1e-10)


def test_wootters_matches_pure_formula_on_projectors():
    rng = rng_stream(31)
    reg = register("A", "B")
    for _ in range(25):
        psi = haar_random_pure(reg, rng=rng)
        mixed = concurrence_two_qubit_mixed(to_density(psi)).value
        pure = concurrence_pure(psi, Bipartition.split(reg, ("A",))).value
        assert mixed == pytest.approx(pure, abs=1e-10)


def test_coa_basics_and_worked_values():
    reg = register("A", "B")
    maximally_mixed = DensityMatrix(reg, np.eye(4) / 4)
    assert concurrence_of_assistance(maximally_mixed).value == pytest.approx(1.0, abs=1e-12)
    prod = tensor_product(computational_state(register("A"), "0"),
                          computational_state(register("B"), "1"))
    assert concurrence_of_assistance(to_density(prod)).value == pytest.approx(0.0, abs=1e-8)
    w = make_w_state()
    assert concurrence_of_assistance(
        reduced_density(w, ("A", "B1"))).value == pytest.approx(0.5, abs=1e-10)


def test_coa_dominates_wootters():
    reg = register("A", "B")
    for i in range(500):
        rho = random_mixed(reg, (i % 4) + 1, seed=4000 + i)
        coa = concurrence_of_assistance(rho).value
        c = concurrence_two_qubit_mixed(rho).value
        assert coa >= c - 1e-10


def test_negativity_basics():
    b = bell()
    assert negativity(to_density(b), cut_a(b)).value == pytest.approx(1.0, abs=1e-12)
    sep = DensityMatrix(register("A", "B"), np.diag([0.4, 0.3, 0.2, 0.1]))
    assert negativity(sep, Bipartition.split(sep.register, ("A",))).value == 0.0


def test_negativity_pure_agrees_with_trace_norm_path():
    psi = example1_state()
    cut = cut_a(psi)
    direct = negativity_pure(psi, cut).value
    via_pt = negativity(to_density(psi), cut).value
    assert direct == pytest.approx(via_pt, abs=1e-10)
    # a qubit focus makes negativity coincide with concurrence on pure cuts
    assert direct == pytest.approx(SQRT21_OVER_6, abs=1e-10)


def test_negativity_pure_all_cuts_match_projector_path():
    rng = rng_stream(32)
    reg = register("A", "B", "C")
    psi = haar_random_pure(reg, rng=rng)
    rho = to_density(psi)
    for side in (("A",), ("B",), ("C",), ("A", "B"), ("A", "C")):
        cut = Bipartition.split(reg, side)
        assert negativity_pure(psi, cut).value == pytest.approx(
            negativity(rho, cut).value, abs=1e-10)


def test_w_state_negativity_and_scren():
    w = make_w_state()
    cut = cut_a(w)
    assert negativity_pure(w, cut).value == pytest.approx(math.sqrt(3) / 2,
                                                          abs=1e-12)
    assert scren_pure(w, cut).value == pytest.approx(0.75, abs=1e-12)
    assert scren_pure(bell(), cut_a(bell())).value == pytest.approx(1.0, abs=1e-12)
    prod = tensor_product(computational_state(register("A"), "0"),
                          computational_state(register("B"), "0"))
    assert scren_pure(prod, cut_a(prod)).value == 0.0


def test_scren_equals_squared_concurrence_on_three_qubit_cuts():
    rng = rng_stream(33)
    reg = register("A", "B", "C")
    for _ in range(20):
        psi = haar_random_pure(reg, rng=rng)
        cut = Bipartition.split(reg, ("A",))
        assert scren_pure(psi, cut).value == pytest.approx(
            concurrence_pure(psi, cut).value ** 2, abs=1e-10)


def test_screnoa_worked_values():
    w = make_w_state()
    assert screnoa_two_qubit(reduced_density(w, ("A", "B1"))).value == \
        pytest.approx(0.25, abs=1e-10)
    assert screnoa_two_qubit(reduced_density(w, ("A", "B2"))).value == \
        pytest.approx(0.5, abs=1e-10)
    prod = tensor_product(computational_state(register("A"), "1"),
                          computational_state(register("B"), "0"))
    assert screnoa_two_qubit(to_density(prod)).value == pytest.approx(0.0, abs=1e-8)


def test_eof_values():
    assert eof_two_qubit(to_density(bell())).value == pytest.approx(1.0, abs=1e-12)
    sep = DensityMatrix(register("A", "B"), np.diag([0.4, 0.3, 0.2, 0.1]))
    assert eof_two_qubit(sep).value == 0.0
    # frozen direct evaluation of the binary-entropy expression at C = 1/2
    reg = register("A", "B")
    half_c = PureState(reg, np.array([math.sqrt(0.5 * (1 + math.sqrt(0.75))),
                                      0.0, 0.0,
                                      math.sqrt(0.5 * (1 - math.sqrt(0.75)))]))
    assert concurrence_pure(half_c, cut_a(half_c)).value == pytest.approx(0.5, abs=1e-12)
    assert eof_two_qubit(to_density(half_c)).value == pytest.approx(
        0.35457890266527003, abs=1e-10)
    assert eof_pure(half_c, cut_a(half_c)).value == pytest.approx(
        0.35457890266527003, abs=1e-10)


def test_two_qubit_guards():
    w = make_w_state()
    rho3 = to_density(w)
    for fn in (concurrence_two_qubit_mixed, concurrence_of_assistance,
               screnoa_two_qubit, scren_two_qubit, eof_two_qubit):
        with pytest.raises(ValueError, match="two-qubit"):
            fn(rho3)


def test_local_unitary_invariance():
    rng = rng_stream(34)
    rng_np = np.random.default_rng(77)
    reg = register("A", "B", "C")
    cut = Bipartition.split(reg, ("A",))
    for _ in range(5):
        psi = haar_random_pure(reg, rng=rng)
        u = np.kron(np.kron(haar_unitary(2, rng_np), haar_unitary(2, rng_np)),
                    haar_unitary(2, rng_np))
        rotated = PureState(reg, u @ psi.amplitudes)
        for fn in (concurrence_pure, negativity_pure, scren_pure, eof_pure):
            assert fn(rotated, cut).value == pytest.approx(
                fn(psi, cut).value, abs=1e-9)
        for red in ((("A", "B")), (("A", "C"))):
            a = concurrence_two_qubit_mixed(reduced_density(psi, red)).value
            b = concurrence_two_qubit_mixed(reduced_density(rotated, red)).value
            assert a == pytest.approx(b, abs=1e-9)


def test_ghz_reductions_are_unentangled():
    ghz = make_ghz_state(3)
    for pair in (("A", "B1"), ("A", "B2")):
        rho = reduced_density(ghz, pair)
        assert concurrence_two_qubit_mixed(rho).value == 0.0
    assert concurrence_pure(ghz, cut_a(ghz)).value == pytest.approx(1.0, abs=1e-12)


def test_measure_value_container():
    val = concurrence_pure(bell(), cut_a(bell()))
    assert val.kind is MeasureKind.CONCURRENCE
    assert val.input_class == "pure-cut"
    assert float(val) == val.value
