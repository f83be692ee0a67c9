from __future__ import annotations

import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from procontracts.errors import CapExceeded, DomainConflictWarning, ParseError, SemanticError
from procontracts.lang import (
    Assign, BinOp, BoolOp, Call, Cmp, DomainConfig, If, LogicalVar, Num, Seq, Skip, Var, While,
    enumerate_states, parse_aexp, parse_bexp, parse_contract_file, parse_program, parse_stmt,
    pretty_contract, pretty_program, program_variables, static_interface,
)
from procontracts.metacheck import CaseGenConfig, gen_program

EVEN_ODD = """
proc even is if n = 0 then r := 1 else (n := n - 1; call odd);
proc odd is if n = 0 then r := 0 else (n := n - 1; call even)
"""


def test_parse_even_odd():
    prog = parse_program(EVEN_ODD)
    assert prog.names == ("even", "odd")
    assert static_interface(prog) == (frozenset(), frozenset({"even", "odd"}))
    body = prog.decl("even").body
    assert body == If(Cmp("=", Var("n"), Num(0)), Assign("r", Num(1)),
                      Seq(Assign("n", BinOp("-", Var("n"), Num(1))), Call("odd")))


def test_smallest_and_open_programs():
    p = parse_program("proc p is skip")
    assert len(p.decls) == 1 and p.decl("p").body == Skip()
    q = parse_program("proc p is call q")
    assert static_interface(q) == (frozenset({"q"}), frozenset({"p"}))
    assert not q.is_closed


def test_self_call_is_not_required():
    assert static_interface(parse_program("proc p is call p")) == (frozenset(), frozenset({"p"}))


def test_domain_header(even_odd):
    assert even_odd.domain == DomainConfig(0, 7, ("n", "r"))


def test_header_wins_with_warning():
    text = "domain 0..3 vars x\nproc p is x := 1"
    with pytest.warns(DomainConflictWarning):
        prog = parse_program(text, DomainConfig(0, 5, ("x",)))
    assert prog.domain.hi == 3
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert parse_program(text, DomainConfig(0, 3, ("x",))).domain.hi == 3


def test_contract_file_matches_odd_contract(table):
    c = parse_contract_file(
        "contract odd logical n0 requires n >= 0 and n = n0 "
        "ensures (n0 mod 2 = 0 => r = 0) and (n0 mod 2 = 1 => r = 1)")["odd"]
    assert c.logicals == {"n0"}
    assert c == table["odd"]
    pre = c.pre.formula
    assert pre == BoolOp("and", Cmp(">=", Var("n"), Num(0)), Cmp("=", Var("n"), LogicalVar("n0")))


def test_vacuous_contract():
    c = parse_contract_file("contract p requires true ensures true")["p"]
    assert not c.logicals


@pytest.mark.parametrize("text", [
    "contract p ensures true requires true",
    "contract requires true ensures true",
    "contract p requires true",
])
def test_malformed_contract(text):
    with pytest.raises(ParseError):
        parse_contract_file(text)


@pytest.mark.parametrize("text", [
    "proc p is x := ",
    "proc p is if x = 0 then skip",
    "proc is skip",
    "proc p is x := 5 mod 2",
    "proc p is while x do skip",
])
def test_syntax_errors(text):
    with pytest.raises(ParseError):
        parse_program(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_program("proc p is\n  x := ;")
    assert err.value.line == 2


def test_logical_variable_in_statement_rejected():
    with pytest.raises((ParseError, SemanticError)):
        parse_program("proc p is x := n0", logicals={"n0"})


def test_unicode_aliases():
    assert parse_bexp("x ≤ 1 ∧ ¬(y ≥ 2)") == parse_bexp("x <= 1 and not (y >= 2)")
    assert parse_bexp("x = 1 ⇒ y = 2") == parse_bexp("x = 1 => y = 2")


def test_precedence():
    assert parse_aexp("1 + 2 * x") == BinOp("+", Num(1), BinOp("*", Num(2), Var("x")))
    assert parse_aexp("x - 1 - 1") == BinOp("-", BinOp("-", Var("x"), Num(1)), Num(1))
    assert parse_bexp("a = 1 or b = 1 and c = 1") == BoolOp(
        "or", Cmp("=", Var("a"), Num(1)), BoolOp("and", Cmp("=", Var("b"), Num(1)), Cmp("=", Var("c"), Num(1))))


def test_parenthesized_boolean_and_arithmetic():
    assert parse_bexp("(x + 1) = 2") == Cmp("=", BinOp("+", Var("x"), Num(1)), Num(2))
    assert parse_bexp("(x = 1)") == Cmp("=", Var("x"), Num(1))


def test_while_and_sequence():
    s = parse_stmt("while n > 0 do n := n - 1; skip")
    assert s == Seq(While(Cmp(">", Var("n"), Num(0)), Assign("n", BinOp("-", Var("n"), Num(1)))), Skip())


def test_comments_ignored():
    assert parse_program("# header\nproc p is skip # trailing\n").decl("p").body == Skip()


def test_enumerate_states():
    assert len(enumerate_states(DomainConfig(0, 1, ("n", "r")))) == 4
    assert len(enumerate_states(DomainConfig(0, 7, ("n",)))) == 8
    states = enumerate_states(DomainConfig(0, 7, ("n", "r")))
    assert len(states) == 64
    assert states[0] == {"n": 0, "r": 0}
    assert states[1] == {"n": 0, "r": 1}


def test_state_cap():
    with pytest.raises(CapExceeded):
        DomainConfig(0, 255, ("a", "b", "c"))
    assert DomainConfig(0, 255, ("a", "b")).num_states == 65536


@given(st.integers(-3, 3), st.integers(0, 4), st.integers(1, 3), st.data())
def test_index_state_inverse(lo, span, k, data):
    d = DomainConfig(lo, lo + span, ("a", "b", "c")[:k])
    i = data.draw(st.integers(0, d.num_states - 1))
    assert d.index(d.state(i)) == i


def test_program_variables_first_occurrence():
    prog = parse_program("proc p is (y := 1; x := y)")
    assert program_variables(prog) == ["y", "x"]


def test_undeclared_variable_against_domain():
    with pytest.raises(SemanticError):
        parse_program("proc p is q := 1", DomainConfig(0, 1, ("x",)))


def test_pretty_round_trip_even_odd(even_odd, table):
    assert parse_program(pretty_program(even_odd)) == even_odd
    for name, c in table.items():
        assert parse_contract_file(pretty_contract(name, c))[name] == c


def test_generator_depth_zero_is_skip_only():
    cfg = CaseGenConfig(seed=1, max_depth=0)
    prog = gen_program(cfg)
    assert all(d.body == Skip() for d in prog.decls)


def test_generator_deterministic():
    cfg = CaseGenConfig(seed=7)
    assert gen_program(cfg) == gen_program(cfg)


@given(st.integers(0, 2**32 - 1))
def test_generated_programs_round_trip(seed):
    prog = gen_program(CaseGenConfig(seed=seed), external=("e0",))
    assert parse_program(pretty_program(prog)) == prog


def test_negative_literals():
    assert parse_aexp("-2") == Num(-2)
    assert parse_aexp("x - -1") == BinOp("-", Var("x"), Num(-1))


def test_generated_within_bounds():
    cfg = CaseGenConfig(seed=3)
    rng = np.random.default_rng(3)
    for _ in range(50):
        prog = gen_program(cfg, rng)
        assert 1 <= len(prog.decls) <= cfg.max_procs
        assert prog.domain.width <= cfg.max_width
        assert len(prog.domain.variables) <= cfg.max_vars
