import pytest

from incacg.category import parse_category
from incacg.engine import initial_state
from incacg.lexicon import toy_corpus, toy_lexicon
from incacg.terms import parse_term
from incacg.transitions import ParserState


@pytest.fixture(scope="session")
def lex():
    return toy_lexicon()


@pytest.fixture(scope="session")
def corpus():
    return toy_corpus()


@pytest.fixture
def start():
    return initial_state("s")


@pytest.fixture
def after_john():
    """Second state of the John-likes-Sue sequence."""
    return ParserState("s", (parse_category("s{l:[np],h:[np]}"),), parse_term(r"\H. H(john')"))


@pytest.fixture
def after_likes():
    """Third state of the John-likes-Sue sequence."""
    return ParserState("s", (parse_category("np"),), parse_term(r"\Y. likes'(john',Y)"))


@pytest.fixture
def likes(lex):
    return lex["likes"][0]


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
