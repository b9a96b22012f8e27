import random

import pytest

from strtool.languages import (
    BINARY,
    BudgetExceeded,
    FiniteLanguage,
    TERNARY,
    check_expansion_laws,
    cylindrify,
    expand_in,
    is_cylinder_in,
    load_language,
    occurs_in,
    random_language,
    save_language,
    sigma_exact,
    sigma_upto,
    strings_of,
)
from strtool.strings import AlphabetMismatch, PartialString


def ps(text, alphabet=BINARY):
    return PartialString.parse(alphabet, text)


def lang(words, alphabet=BINARY):
    return FiniteLanguage.of(alphabet, words)


class TestFiniteLanguage:
    def test_rejects_foreign_symbols(self):
        with pytest.raises(ValueError):
            lang(["012"])

    def test_slices(self):
        assert len(sigma_exact(BINARY, 2)) == 4
        assert len(sigma_upto(BINARY, 2)) == 7
        assert "" in sigma_upto(BINARY, 2)
        assert len(sigma_upto(TERNARY, 6)) == 1093

    def test_set_operations_check_alphabet(self):
        with pytest.raises(AlphabetMismatch):
            lang(["0"]).union(lang(["0"], TERNARY))


class TestExpandIn:
    def test_examples(self):
        L = sigma_exact(BINARY, 2)
        assert expand_in({ps("1")}, L).words == {"10", "11"}
        assert expand_in({PartialString.bottom(BINARY)}, L) == L
        assert expand_in(frozenset(), L).words == frozenset()

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            expand_in({ps("1", TERNARY)}, sigma_exact(BINARY, 2))


class TestCylindrify:
    def test_prefix_semantics(self):
        L = sigma_upto(BINARY, 2)
        assert cylindrify(lang(["1"]), L).words == {"1", "10", "11"}

    def test_idempotent_and_union(self):
        L = sigma_upto(BINARY, 3)
        A = lang(["1", "00"])
        B = lang(["01"])
        cyl = cylindrify(A, L)
        assert cylindrify(cyl, L) == cyl
        assert cylindrify(A.union(B), L) == cyl.union(cylindrify(B, L))

    def test_is_cylinder_in(self):
        E = lang(["1", "10"])
        assert not is_cylinder_in(lang(["1"]), E)
        assert is_cylinder_in(E, E)
        prefix_free = sigma_exact(BINARY, 2)
        assert is_cylinder_in(lang(["01", "10"]), prefix_free)
        with pytest.raises(ValueError):
            is_cylinder_in(lang(["111"]), E)


class TestStringsOf:
    def test_single_word(self):
        out = strings_of(lang(["10"]))
        assert {g.render() for g in out} == {"", "1", "_0", "10"}

    def test_empty_language(self):
        assert strings_of(lang([])) == frozenset()

    def test_membership_via_expansion(self):
        E = lang(["10", "01"])
        for g in strings_of(E):
            assert occurs_in(g, E)
            assert len(expand_in({g}, E)) > 0
        assert not occurs_in(ps("11"), E)

    def test_domain_restriction(self):
        out = strings_of(lang(["10"]), domain_positions={2})
        assert {g.render() for g in out} == {"", "_0"}

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            strings_of(lang(["1" * 8]), budget=10)


class TestLawSuite:
    def test_holds_on_seeded_runs(self):
        report = check_expansion_laws(60, seed=5)
        assert report.holds
        assert report.checks["intersection-of-strings"] == 60
        assert not report.failures

    def test_reports_are_reproducible(self):
        a = check_expansion_laws(25, seed=9).to_json()
        b = check_expansion_laws(25, seed=9).to_json()
        assert a == b

    def test_random_language_respects_cap(self):
        rng = random.Random(0)
        for _ in range(50):
            L = random_language(rng, TERNARY, 4)
            assert L.max_len <= 4


class TestLanguageFiles:
    def test_roundtrip(self, tmp_path):
        L = lang(["10", "0", "111"])
        path = tmp_path / "words.lang"
        save_language(L, path)
        assert load_language(path) == L

    def test_comments_and_blanks(self, tmp_path):
        path = tmp_path / "words.lang"
        path.write_text("# fixture\nalphabet=01\n10  # inline\n\n0\n")
        loaded = load_language(path)
        assert loaded.words == {"10", "0"}

    def test_missing_header(self, tmp_path):
        path = tmp_path / "bad.lang"
        path.write_text("10\n")
        with pytest.raises(ValueError):
            load_language(path)
