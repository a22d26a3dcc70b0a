import pytest

from app.core.config import settings
from app.core.errors import ShapeError
from app.models.automaton import OrderStatus, parse_recursion
from app.models.series import RationalSeries
from app.schemas.analysis import CertificateReason
from app.services.tree_action_service import ElementIndex, TreeActionService, reduced_words


class TestAction:
    def test_root_perm(self, engine, word, numbered):
        e = engine(731)
        assert e.root_perm(word("a", numbered(731))) == (1, 0)
        assert e.root_perm(()) == (0, 1)
        assert e.root_perm(word("aa", numbered(731))) == (0, 1)

    def test_sections_follow_recursion(self, engine, word, numbered):
        e = engine(731)
        a = word("a", numbered(731))
        assert str(e.section(a, "1")) == "a"
        assert str(e.section(a, "0")) == "b"

    def test_chain_rule(self, engine, word, numbered):
        automaton = numbered(2240)
        e = engine(automaton)
        a, b = word("a", automaton), word("b", automaton)
        for v in ("0", "1", "01", "110"):
            left = e.section_symbols(a + b, v)
            right = e.section_symbols(a, e.act(b, v)) + e.section_symbols(b, v)
            assert e.equals(left, right)

    def test_adding_machine_carries(self, engine, adding_machine):
        e = engine(adding_machine)
        assert e.act((0,), "1111") == "0000"
        assert e.act((0,), "0110") == "1110"
        assert e.act((0,), (1, 0)) == (0, 1)

    def test_875_moves_first_letter(self, engine):
        assert engine(875).act((0,), "100000") == "010000"

    def test_empty_word_fixes_vertices(self, engine):
        assert engine(2240).act((), "0101") == "0101"


class TestWordProblem:
    @pytest.mark.parametrize("n, text, expected", [
        (2212, "ca^2", True),
        (2212, "cb^2", True),
        (731, "b^{-1}c", True),
        (731, "ba^2", True),
        (731, "a", False),
        (870, "a^{-1}ca^{-1}b", True),
        (846, "abab", False),
    ])
    def test_is_identity(self, engine, word, numbered, n, text, expected):
        assert engine(n).is_identity(word(text, numbered(n))) is expected

    def test_trivial_states_vanish(self, engine, word, numbered):
        assert engine(852).is_identity(word("b", numbered(852)))
        assert engine(1).is_identity(word("abc", numbered(1)))

    @pytest.mark.parametrize("n, first, second, expected", [
        (820, "b", "c", True),
        (767, "c", "aa", True),
        (2240, "a", "b", False),
    ])
    def test_equals(self, engine, word, numbered, n, first, second, expected):
        automaton = numbered(n)
        assert engine(n).equals(word(first, automaton), word(second, automaton)) is expected

    def test_portraits_agree_on_equal_elements(self, engine, word, numbered):
        automaton = numbered(731)
        e = engine(731)
        assert e.portrait_id(e.canonical(word("b", automaton)), 5) == e.portrait_id(e.canonical(word("A^2", automaton)), 5)

    def test_memo_tables_stay_bounded(self, numbered, monkeypatch):
        monkeypatch.setattr(settings, "engine_memo_limit", 16)
        e = TreeActionService(numbered(2240))
        words = list(reduced_words(3, 3))
        first = e.portrait_id(e.canonical(words[0]), 4)
        assert not any(e.is_identity(w) for w in words)
        for w in words:
            e.portrait_id(e.canonical(w), 4)
        assert max(len(e._steps), len(e._identity), len(e._portraits)) <= 16
        assert e.portrait_id(e.canonical(words[0]), 4) == first
        assert e.is_identity((0, 3))


class TestOrders:
    def test_involution(self, engine, word, numbered):
        assert engine(748).order_bounded(word("a", numbered(748)), 64) == 2

    def test_finite_order_beyond_two(self, engine, word, numbered):
        assert engine(748).order_bounded(word("ab", numbered(748)), 64) == 4

    def test_adding_machine_has_infinite_order(self, engine, word, numbered):
        assert engine(731).order_bounded(word("a", numbered(731)), 64) == OrderStatus.INFINITE

    def test_empty_word(self, engine):
        assert engine(731).order_bounded((), 64) == 1

    def test_certificate_by_transitivity(self, engine, adding_machine):
        certificate = engine(adding_machine).infinite_order_certificate((0,))
        assert certificate.reason == CertificateReason.LEVEL_TRANSITIVE
        assert certificate.power == 1

    def test_no_certificate_for_torsion(self, engine, word, numbered):
        assert engine(748).infinite_order_certificate(word("a", numbered(748))) is None


class TestTransitivity:
    def test_adding_machine_series(self, engine, adding_machine):
        assert engine(adding_machine).transitivity_series((0,)) == RationalSeries.geometric()

    def test_identity_series(self, engine):
        assert engine(731).transitivity_series(()) == RationalSeries()

    def test_2199_ac(self, engine, word, numbered):
        e = engine(2199)
        ac = word("ac", numbered(2199))
        assert e.transitivity_series(ac) == RationalSeries.geometric()
        assert e.is_level_transitive(ac)

    def test_involution_is_not_transitive(self, engine, word, numbered):
        e = engine(748)
        a = word("a", numbered(748))
        assert not e.is_level_transitive(a)
        assert e.transitivity_series(a) != RationalSeries.geometric()

    @pytest.mark.parametrize("level", [1, 4, 7])
    def test_orbits_of_adding_machine(self, engine, adding_machine, level):
        assert engine(adding_machine).orbit_sizes((0,), level) == [2 ** level]

    def test_series_matches_orbits(self, engine, word, numbered):
        """Transitive on level n iff the first n coefficients are all odd"""
        automaton = numbered(2199)
        e = engine(automaton)
        for text in ("ac", "a", "ab", "Bc"):
            w = word(text, automaton)
            series = e.transitivity_series(w).expand(9)
            for n in range(1, 9):
                assert all(series[:n]) == (e.orbit_sizes(w, n) == [2 ** n])

    def test_needs_binary_alphabet(self):
        ternary = parse_recursion("a=(012)(a,a,a)", d=3)
        with pytest.raises(ShapeError):
            TreeActionService(ternary).transitivity_series((0,))


class TestLemmas:
    def test_nontorsion_partition(self, engine):
        assert engine(870).nontorsion_partition() is not None
        assert engine(1).nontorsion_partition() is None
        assert engine(820).nontorsion_partition() == ((0,), (1, 2))

    def test_no_witness_in_abelian_group(self, engine):
        assert engine(731).not_free_witness(4) is None

    @pytest.mark.slow
    @pytest.mark.parametrize("n, radius", [(744, 6), (885, 4)])
    def test_not_free_witness(self, engine, word, numbered, n, radius):
        automaton = numbered(n)
        e = engine(automaton)
        witness = e.not_free_witness(radius)
        assert witness is not None
        first = word(witness.first, automaton)
        assert e.is_identity(e.section_symbols(first, "0"))
        assert e.equals(e.section_symbols(first, "1"), word(witness.first_section, automaton))
        second = word(witness.second, automaton)
        assert e.is_identity(e.section_symbols(second, "1"))
        assert e.equals(e.section_symbols(second, "0"), word(witness.second_section, automaton))


class TestEnumerationHelpers:
    def test_reduced_word_counts(self):
        words = list(reduced_words(3, 3))
        assert len(words) == 6 + 6 * 5 + 6 * 25
        assert words[0] == (0,)

    def test_element_index_merges_equal_words(self, engine, word, numbered):
        automaton = numbered(731)
        index = ElementIndex(engine(731))
        assert index.add(word("b", automaton)) == (0, True)
        assert index.add(word("c", automaton)) == (0, False)
        assert index.add(word("a^{-2}", automaton)) == (0, False)
        assert word("a", automaton) not in index
