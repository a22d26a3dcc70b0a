import pytest
from pydantic import ValidationError

from app.core.errors import WordSyntaxError
from app.models.automaton import (
    Automaton, all_symmetry_ops, automaton_count, cycle_notation, format_recursion, parse_recursion,
)
from app.models.level_group import LevelGroup
from app.models.series import RationalSeries
from app.models.word import GenWord, cyclically_reduce, format_word, free_reduce, parse_word


class TestAutomaton:
    def test_count_of_numbered_automata(self):
        assert automaton_count(3, 2) == 5832
        assert automaton_count(2, 2) == 64

    def test_symmetry_ops_cover_inversion_and_renamings(self):
        assert len(list(all_symmetry_ops(3, 2))) == 2 * 6 * 2

    def test_identity_state_is_not_a_generator(self, adding_machine):
        assert adding_machine.m == 2
        assert adding_machine.identity_state == 1
        assert adding_machine.generators == [0]
        assert adding_machine.trivial_states() == [1]

    def test_rejects_bad_rows(self):
        with pytest.raises(ValidationError):
            Automaton(d=2, m=1, output=((0, 0),), transition=((0, 0),))
        with pytest.raises(ValidationError):
            Automaton(d=2, m=1, output=((1, 0),), transition=((0, 3),))

    def test_equality_ignores_labels(self):
        plain = Automaton(d=2, m=1, output=((1, 0),), transition=((0, 0),))
        named = plain.model_copy(update={"labels": ("x",)})
        assert plain == named
        assert hash(plain) == hash(named)


class TestRecursionText:
    @pytest.mark.parametrize("text", [
        "a=σ(1,a)",
        "a=σ(b,c), b=(a,b), c=(c,a)",
        "a=σ(b,a), b=(a,a), c=(a,a)",
    ])
    def test_format_inverts_parse(self, text):
        assert format_recursion(parse_recursion(text)) == text

    def test_ascii_sigma(self):
        assert parse_recursion("a=s(b,a), b=(a,a)") == parse_recursion("a=σ(b,a), b=(a,a)")

    def test_larger_alphabet_uses_cycle_notation(self):
        automaton = parse_recursion("a=(012)(b,a,a), b=(a,b,b)", d=3)
        assert automaton.output[0] == (1, 2, 0)
        assert format_recursion(automaton) == "a=(012)(b,a,a), b=(a,b,b)"

    @pytest.mark.parametrize("text", ["a=σ(b)", "a=σ(x,a)", "a=(a,a), a=(a,a)", ""])
    def test_rejects_malformed(self, text):
        with pytest.raises(ValueError):
            parse_recursion(text)

    def test_cycle_notation(self):
        assert cycle_notation((2, 0, 1), "abc") == "(acb)"
        assert cycle_notation((0, 1)) == "1"


class TestWords:
    def test_relator_notation(self, numbered):
        automaton = numbered(731)
        assert parse_word("b^{-1}c", automaton).symbols == (4, 2)
        assert parse_word("ba^{2}", automaton).symbols == (1, 0, 0)
        assert parse_word("(ab)^2", automaton).symbols == (0, 1, 0, 1)
        assert parse_word("a^-2", automaton).symbols == (3, 3)
        assert parse_word("a \\cdot b", automaton).symbols == (0, 1)
        assert parse_word("1", automaton).symbols == ()

    def test_commutator_and_conjugate(self, numbered):
        automaton = numbered(852)
        assert parse_word("[a,b]", automaton).symbols == (3, 4, 0, 1)
        assert parse_word("a^{b}", automaton).symbols == (4, 0, 1)

    def test_uppercase_is_inverse(self, numbered):
        automaton = numbered(731)
        assert parse_word("Ab", automaton).symbols == (3, 1)

    @pytest.mark.parametrize("text", ["a^", "x", "(ab", "[a,b"])
    def test_syntax_errors_carry_position(self, numbered, text):
        with pytest.raises(WordSyntaxError) as info:
            parse_word(text, numbered(731))
        assert info.value.position >= 0

    def test_format(self, numbered):
        automaton = numbered(731)
        assert format_word((0, 0, 1), automaton) == "a^2b"
        assert format_word((4, 2), automaton) == "Bc"
        assert format_word((), automaton) == "1"

    def test_genword_must_be_reduced(self, numbered):
        with pytest.raises(ValidationError):
            GenWord(automaton=numbered(731), letters=((0, 1), (0, -1)))

    def test_product_and_inverse(self, numbered):
        automaton = numbered(731)
        w = parse_word("ab", automaton)
        assert (w * w.inverse()).symbols == ()
        assert w.inverse().symbols == (4, 3)

    def test_reductions(self):
        assert free_reduce((0, 3, 1), 3) == (1,)
        assert cyclically_reduce((0, 1, 3), 3) == (1,)


class TestSeries:
    def test_geometric(self):
        series = RationalSeries.geometric()
        assert series.expand(5) == (1, 1, 1, 1, 1)
        assert str(series) == "(1)/(1+t)"

    def test_zero(self):
        assert str(RationalSeries()) == "0"
        assert RationalSeries().expand(3) == (0, 0, 0)

    def test_lowest_terms_required(self):
        with pytest.raises(ValidationError):
            RationalSeries(numerator=(1, 1), denominator=(1, 1))

    def test_level_group_exponent(self):
        assert LevelGroup(level=3, degree=8, order=8).exponent == 3
        assert LevelGroup(level=3, degree=8, order=6).exponent == -1
