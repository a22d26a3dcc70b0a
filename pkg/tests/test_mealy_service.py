import logging

import pytest

from app.core.errors import OutOfRangeError, ShapeError
from app.models.automaton import Invertibility, SmallGroup, SymmetryOp, format_recursion
from app.services.mealy_service import NUMBER_COUNT, MealyService


class TestNumbering:
    def test_automaton_one_is_all_zero(self, numbered):
        automaton = numbered(1)
        assert automaton.output == ((0, 1),) * 3
        assert automaton.transition == ((0, 0),) * 3

    @pytest.mark.parametrize("n, recursion", [
        (731, "a=σ(b,a), b=(a,a), c=(a,a)"),
        (2240, "a=σ(b,c), b=σ(c,b), c=(a,a)"),
        (820, "a=σ(a,a), b=(b,a), c=(b,a)"),
        (846, "a=σ(c,c), b=(a,b), c=(b,a)"),
    ])
    def test_decode(self, numbered, n, recursion):
        assert format_recursion(numbered(n)) == recursion

    def test_encode_inverts_decode(self, mealy):
        assert all(mealy.encode_number(mealy.decode_number(n)) == n for n in range(1, NUMBER_COUNT + 1))

    @pytest.mark.parametrize("n", [0, -3, 5833])
    def test_out_of_range(self, mealy, n, caplog):
        with caplog.at_level(logging.ERROR), pytest.raises(OutOfRangeError):
            mealy.decode_number(n)
        assert f"number {n} is outside 1..5832" in caplog.text

    def test_encode_needs_three_binary_states(self, mealy, adding_machine, caplog):
        with caplog.at_level(logging.ERROR), pytest.raises(ShapeError):
            mealy.encode_number(adding_machine)
        assert "Cannot number automaton" in caplog.text


class TestInverseAndDual:
    def test_inverse_of_adding_machine(self, mealy, adding_machine):
        assert format_recursion(mealy.invert(adding_machine)) == "a=σ(a,1)"

    def test_involutions_are_self_inverse(self, mealy, numbered):
        assert mealy.encode_number(mealy.invert(numbered(846))) == 846

    def test_invert_twice(self, mealy, numbered):
        automaton = numbered(2240)
        assert mealy.invert(mealy.invert(automaton)) == automaton

    def test_dual_of_846(self, mealy, numbered):
        automaton = numbered(846)
        dual = mealy.dual(automaton)
        assert dual.m == 2 and dual.d == 3
        assert format_recursion(dual, letter_names="abc") == "A=(acb)(B,A,A), B=(ac)(A,B,B)"

    def test_dual_not_invertible(self, mealy, numbered):
        assert mealy.dual(numbered(1)) == Invertibility.NOT_INVERTIBLE

    @pytest.mark.parametrize("n, expected", [(2240, True), (846, True), (1, False)])
    def test_fully_invertible(self, mealy, numbered, n, expected):
        assert mealy.is_fully_invertible(numbered(n)) is expected


class TestMinimization:
    @pytest.mark.parametrize("n, states", [(820, 2), (1, 1), (2240, 3), (766, 3), (730, 2)])
    def test_state_counts(self, mealy, numbered, n, states):
        assert mealy.minimize(numbered(n)).m == states

    def test_state_map_merges_equivalent_states(self, mealy, numbered):
        _, image = mealy.minimize_with_map(numbered(820))
        assert image[1] == image[2]
        assert image[0] != image[1]

    def test_apply_symmetry_renames(self, mealy, numbered):
        swap_bc = SymmetryOp(state_perm=(0, 2, 1), letter_perm=(0, 1))
        renamed = mealy.apply_symmetry(numbered(731), swap_bc)
        assert format_recursion(renamed) == "a=σ(c,a), b=(a,a), c=(a,a)"

    def test_apply_symmetry_checks_shape(self, mealy, numbered):
        with pytest.raises(ShapeError):
            mealy.apply_symmetry(numbered(731), SymmetryOp(state_perm=(0, 1), letter_perm=(0, 1)))


class TestSymmetryClasses:
    @pytest.mark.parametrize("n, representative", [(742, 740), (740, 740), (766, 766)])
    def test_representatives(self, mealy, numbered, n, representative):
        assert mealy.symmetry_class(numbered(n))[1] == representative

    @pytest.mark.parametrize("n", [731, 820])
    def test_small_machines_have_no_number(self, mealy, numbered, n):
        canonical, number = mealy.symmetry_class(numbered(n))
        assert number is None
        assert canonical.m == 2

    def test_class_is_invariant_under_symmetries(self, mealy, numbered):
        automaton = numbered(2240)
        expected = mealy.symmetry_class(automaton)
        op = SymmetryOp(invert=True, state_perm=(2, 0, 1), letter_perm=(1, 0))
        assert mealy.symmetry_class(mealy.apply_symmetry(automaton, op)) == expected

    @pytest.mark.parametrize("n, group", [
        (1, SmallGroup.TRIVIAL),
        (730, SmallGroup.KLEIN),
        (820, SmallGroup.D_INFINITY),
        (5832, SmallGroup.C2),
    ])
    def test_small_group_labels(self, mealy, numbered, n, group):
        assert mealy.small_group_label(numbered(n)) == group

    def test_no_label_for_three_state_classes(self, mealy, numbered):
        assert mealy.small_group_label(numbered(2240)) is None

    @pytest.mark.slow
    def test_classify_all(self, mealy):
        table = mealy.classify_all(jobs=1)
        assert len(table.representatives) == 194
        assert sum(1 for count in table.reduced_state_count.values() if count < 3) == 10
        assert all(table.class_rep[n] == 1 for n in range(1, 730))
        assert {table.class_rep[n] for n in range(5104, 5833)} == {1090}
        assert table.class_rep[742] == 740


class TestStructuralFlags:
    def test_adding_machine(self, mealy, adding_machine):
        flags = mealy.structural_flags(adding_machine)
        assert flags.has_trivial_state
        assert flags.open_set_condition

    def test_846(self, mealy, numbered):
        assert mealy.structural_flags(numbered(846)).dual_invertible

    def test_2240(self, mealy, numbered):
        flags = mealy.structural_flags(numbered(2240))
        assert not flags.has_trivial_state
        assert not flags.open_set_condition
        assert flags.strongly_connected
