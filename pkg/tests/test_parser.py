from pathlib import Path

import pytest

from absdist.groundness import Groundness, GroundSub
from absdist.parser import (
    ParseError,
    ProgramError,
    entry_to_abstract,
    format_program,
    parse_program,
    program_points,
    read_term,
)
from absdist.sharing import ShareSub, Sharing
from absdist.terms import Struct, Var

ROOT = Path(__file__).resolve().parent.parent


def trusted():
    return parse_program((ROOT / "corpus/quicksort/quicksort_trust.pl").read_text())


def test_quicksort_listing():
    prog = trusted()
    assert prog.module == "quicksort"
    assert prog.exports == [("quicksort", 2)]
    assert prog.imports == [("partition", 4)]
    assert [c.index for c in prog.clauses(("qsort", 3))] == [1, 2]
    assert [c.pp_index for c in prog.clauses(("qsort", 3))] == [None, 1]
    (trust,) = prog.trusts[("partition", 4)]
    assert [p.functor for p in trust.pre] == ["ground", "ground"]
    assert prog.is_imported(("partition", 4)) and not prog.is_defined(("partition", 4))
    e = prog.entry()
    assert e.pp == "quicksort/2/0"


def test_program_points():
    assert program_points(trusted()) == [
        "quicksort/2/0",
        "quicksort/2/1/1",
        "qsort/3/1/1",
        "qsort/3/1/2",
        "qsort/3/1/3",
    ]


def test_entry_to_abstract():
    e = trusted().entry()
    assert entry_to_abstract(e, Groundness()) == GroundSub.of({"Xs": "g", "Ys": "ng"})
    assert entry_to_abstract(e, Sharing()) == ShareSub.of([["Ys"]], ["Xs", "Ys"])


def test_fact_only_program():
    prog = parse_program("p.")
    assert prog.clauses(("p", 0))[0].body == ()
    with pytest.raises(ProgramError):
        prog.entry()


def test_dangling_comma_reports_position():
    with pytest.raises(ParseError) as info:
        parse_program("p :- q,\n   .")
    assert info.value.line == 2


@pytest.mark.parametrize(
    "text",
    [
        "p(",
        "p :- 'abc",
        "/* open",
        "p :- X.",
        ":- entry p(X) : ground(Y).\np(_).",
        ":- entry q.\np.",
        ":- entry p.\n:- entry p.\np.",
        ":- trust calls p.",
    ],
)
def test_rejected_programs(text):
    with pytest.raises(ParseError):
        parse_program(text)


def test_terms():
    assert read_term("[1,2|T]") == Struct(".", (Struct("1"), Struct(".", (Struct("2"), Var("T")))))
    assert read_term("X = f(Y)") == Struct("=", (Var("X"), Struct("f", (Var("Y"),))))
    assert read_term("a :- b, c").functor == ":-"
    assert read_term("X is Y + 1 * 2").args[1] == Struct("+", (Var("Y"), Struct("*", (Struct("1"), Struct("2")))))
    anon = read_term("f(_, _)")
    assert anon.args[0] != anon.args[1]


def test_format_round_trip():
    for path in sorted((ROOT / "corpus").rglob("*.pl")):
        prog = parse_program(path.read_text())
        again = parse_program(format_program(prog))
        assert format_program(again) == format_program(prog), path.name
        assert program_points(again) == program_points(prog)
        assert again.entries == prog.entries
        assert again.trusts == prog.trusts


def test_comments_and_quoted_atoms():
    prog = parse_program("% line\n/* block */ p('hello world').\n")
    assert prog.clauses(("p", 1))[0].head.args[0] == Struct("hello world")
