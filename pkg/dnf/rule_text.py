"""
Rule text grammar:

    rule    := clause ("OR" clause)* | "FALSE"
    clause  := "(" literal ("AND" literal)* ")"
    literal := ["NOT"] name

Names are x<k> or dataset feature names (any run of non-space characters other
than parentheses). Keywords are case-insensitive. "()" is accepted as the empty
(always-true) clause so that every DnfRule prints to parseable text.
"""
from dataclass.rule import Clause, DnfRule, Literal
from typing import Dict, List, Optional, Sequence
from util.exceptions import ComplementaryLiteralError, RuleParseError
import pyparsing as pp
import re


_AND = pp.CaselessKeyword('AND')
_OR = pp.CaselessKeyword('OR')
_NOT = pp.CaselessKeyword('NOT')
_FALSE = pp.CaselessKeyword('FALSE')

_NAME = (~(_AND | _OR | _NOT | _FALSE) + pp.Regex(r'[^\s()]+')).set_parse_action(
    lambda s, loc, toks: [(loc, toks[0])]
)
_LITERAL = pp.Group(pp.Optional(_NOT)('negated') + _NAME('name'))
_CLAUSE = pp.Group(
    pp.Suppress('(') + pp.Optional(_LITERAL + pp.ZeroOrMore(pp.Suppress(_AND) + _LITERAL)) + pp.Suppress(')')
)
_RULE = (_FALSE('false') | (_CLAUSE + pp.ZeroOrMore(pp.Suppress(_OR) + _CLAUSE))) + pp.StringEnd()

_VAR_NAME = re.compile(r'^[xX](\d+)$')


def _resolve(text: str, loc: int, name: str, index_of: Dict[str, int]) -> int:
    if name in index_of:
        return index_of[name]
    match = _VAR_NAME.match(name)
    if match and int(match.group(1)) >= 1:
        return int(match.group(1))
    raise RuleParseError(text, loc, f'unknown variable name "{name}"')


def parse_rule(text: str, names: Optional[Sequence[str]] = None, allow_complementary: bool = False) -> DnfRule:
    """
    Parse rule text into a DnfRule; feature names resolve to their 1-based position
    """
    index_of = {name: i + 1 for i, name in enumerate(names or [])}
    try:
        parsed = _RULE.parse_string(text.strip(), parse_all=True)
    except pp.ParseException as e:
        raise RuleParseError(text, e.loc, e.msg)

    if 'false' in parsed:
        return DnfRule(frozenset(), len(names or []))

    clauses: List[Clause] = []
    for group in parsed:
        literals = []
        for lit in group:
            loc, name = lit['name']
            literals.append(Literal(_resolve(text, loc, name, index_of), 'negated' not in lit))
        try:
            clauses.append(Clause.of(literals, allow_complementary=allow_complementary))
        except ComplementaryLiteralError as e:
            raise RuleParseError(text, 0, e.message)
    return DnfRule(frozenset(clauses), len(names or []))


def _literal_text(lit: Literal, names: Optional[Sequence[str]]) -> str:
    if names is not None and lit.variable <= len(names):
        name = names[lit.variable - 1]
    else:
        name = f'x{lit.variable}'
    return name if lit.positive else f'NOT {name}'


def print_rule(rule: DnfRule, names: Optional[Sequence[str]] = None) -> str:
    """
    Canonical text: clauses by (size, literal indices), literals by (variable, polarity)
    """
    if rule.is_empty:
        return 'FALSE'
    parts = []
    for clause in rule.ordered:
        parts.append('(' + ' AND '.join(_literal_text(lit, names) for lit in clause.ordered) + ')')
    return ' OR '.join(parts)
