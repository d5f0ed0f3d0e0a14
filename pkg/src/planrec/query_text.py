"""SQL SELECT normalization and clause-qualified tokenization.

A raw SELECT statement is reduced to a list of clause-qualified terms:
literals, aliases, and qualifiers are stripped, each WHERE/HAVING
conjunct or disjunct collapses to its leading column reference, and every
surviving payload is tagged with the clause it came from ("WHERE salary").
Two queries that differ only in bind values therefore tokenize
identically, which is what makes template classes separable downstream.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import EmptyQuery, ParseError, UnsupportedStatement


class Clause(Enum):
    SELECT = "SELECT"
    FROM = "FROM"
    WHERE = "WHERE"
    GROUP_BY = "GROUP BY"
    ORDER_BY = "ORDER BY"
    HAVING = "HAVING"
    OTHER = "OTHER"

    @property
    def keyword(self) -> str:
        return self.value


@dataclass(frozen=True)
class Query:
    """One raw SQL statement with a stable id and optional plan label."""

    id: str
    text: str
    qep_hash: Optional[str] = None


@dataclass(frozen=True)
class ClauseUnit:
    clause: Clause
    payload: str


@dataclass(frozen=True)
class TokenizedQuery:
    id: str
    terms: tuple[str, ...]


# --------------------------------------------------------------------------
# Lexer
# --------------------------------------------------------------------------

_KEYWORDS = {
    "select", "from", "where", "group", "order", "by", "having",
    "and", "or", "not", "as", "distinct", "all", "on", "join",
    "inner", "left", "right", "full", "cross", "outer", "natural",
    "using", "between", "in", "like", "is", "null", "true", "false",
    "asc", "desc", "limit", "offset", "fetch", "union", "intersect",
    "except", "exists", "case", "escape", "row", "rows", "only",
    "first", "next",
}

_NON_SELECT_STATEMENTS = {
    "insert", "update", "delete", "create", "drop", "alter", "truncate",
    "grant", "revoke", "with", "merge", "explain", "set", "begin",
    "commit", "rollback",
}

# Numbers accept thousands separators in groups of three ("90,000").
_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<str>'(?:[^']|'')*')
      | (?P<qid>"[^"]*")
      | (?P<num>\d{1,3}(?:,\d{3})+(?:\.\d+)?|\d+\.\d*|\.\d+|\d+)
      | (?P<word>[A-Za-z_][A-Za-z_0-9$]*)
      | (?P<sym><>|!=|<=|>=|\|\||[(),.*+\-/<>=%;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # str | qid | num | word | sym
    text: str
    pos: int

    @property
    def lower(self) -> str:
        return self.text.lower()

    def is_kw(self, *words: str) -> bool:
        return self.kind == "word" and self.text.lower() in words


def _lex(raw: str) -> list[_Token]:
    tokens = []
    pos = 0
    n = len(raw)
    while pos < n:
        m = _TOKEN_RE.match(raw, pos)
        if m is None:
            if raw[pos] == "'":
                raise ParseError(pos, "unterminated string literal")
            raise ParseError(pos, f"unexpected character {raw[pos]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append(_Token(kind, m.group(), m.start()))
    return tokens


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------

_CLAUSE_BOUNDARY = {
    "from", "where", "group", "having", "order",
    "limit", "offset", "fetch", "union", "intersect", "except",
}
_JOIN_WORDS = {"join", "inner", "left", "right", "full", "cross", "natural"}
_OPERATOR_SYMS = {"+", "-", "/", "%", "<", ">", "=", "<=", ">=", "<>", "!=", "||"}


class _Parser:
    def __init__(self, tokens: list[_Token], raw: str):
        self.tokens = tokens
        self.raw = raw
        self.i = 0

    # -- token stream helpers ---------------------------------------------

    def peek(self, ahead: int = 0) -> Optional[_Token]:
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _err(self, tok: Optional[_Token], message: str) -> ParseError:
        pos = tok.pos if tok is not None else len(self.raw)
        return ParseError(pos, message)

    def _at_boundary(self) -> bool:
        tok = self.peek()
        if tok is None:
            return True
        if tok.kind == "sym" and tok.text == ";":
            return True
        return tok.kind == "word" and tok.lower in _CLAUSE_BOUNDARY

    # -- entry point -------------------------------------------------------

    def parse(self) -> list[ClauseUnit]:
        tok = self.peek()
        if tok is None:
            raise ParseError(0, "empty statement")
        if not tok.is_kw("select"):
            if tok.kind == "word" and tok.lower in _NON_SELECT_STATEMENTS:
                raise UnsupportedStatement(
                    f"only SELECT statements are supported, got {tok.text.upper()}"
                )
            raise self._err(tok, f"expected SELECT, got {tok.text!r}")
        self.advance()
        while (t := self.peek()) is not None and t.is_kw("distinct", "all"):
            self.advance()

        units: list[ClauseUnit] = []
        for payload in self._item_list(allow_alias=True):
            units.append(ClauseUnit(Clause.SELECT, payload))

        tok = self.peek()
        if tok is not None and tok.is_kw("from"):
            self.advance()
            units.extend(self._from_clause())

        tok = self.peek()
        if tok is not None and tok.is_kw("where"):
            self.advance()
            for payload in self._condition():
                units.append(ClauseUnit(Clause.WHERE, payload))

        tok = self.peek()
        if tok is not None and tok.is_kw("group"):
            self.advance()
            self._expect_kw("by")
            for payload in self._item_list(allow_alias=False):
                units.append(ClauseUnit(Clause.GROUP_BY, payload))

        tok = self.peek()
        if tok is not None and tok.is_kw("having"):
            self.advance()
            for payload in self._condition():
                units.append(ClauseUnit(Clause.HAVING, payload))

        tok = self.peek()
        if tok is not None and tok.is_kw("order"):
            self.advance()
            self._expect_kw("by")
            for payload in self._item_list(allow_alias=False):
                units.append(ClauseUnit(Clause.ORDER_BY, payload))

        units.extend(self._trailing_clauses())
        # canonical clause order (stable within a clause) so that JOIN..ON
        # conditions group with WHERE and render/normalize is a fixed point
        rank = {c: i for i, c in enumerate(Clause)}
        units.sort(key=lambda u: rank[u.clause])
        return units

    def _expect_kw(self, word: str) -> None:
        tok = self.peek()
        if tok is None or not tok.is_kw(word):
            raise self._err(tok, f"expected {word.upper()}")
        self.advance()

    # -- atoms -------------------------------------------------------------

    def _atom(self) -> str:
        """A column reference or function call; returns its payload.

        Qualifiers ("sch.tab.col") are stripped to the last component;
        quoted identifiers are unquoted; everything is lower-cased.
        Function payloads keep the call shape with literal args removed.
        """
        tok = self.advance()
        if tok.kind == "sym" and tok.text == "*":
            return "*"
        if tok.kind == "qid":
            name = tok.text[1:-1].lower()
        elif tok.kind == "word":
            name = tok.lower
        else:
            raise self._err(tok, f"expected identifier, got {tok.text!r}")
        # qualifier chain: keep only the last part
        while (t := self.peek()) is not None and t.kind == "sym" and t.text == ".":
            self.advance()
            part = self.peek()
            if part is None or part.kind not in ("word", "qid") and not (
                part.kind == "sym" and part.text == "*"
            ):
                raise self._err(part, "expected identifier after '.'")
            part = self.advance()
            if part.kind == "sym":
                name = "*"
            elif part.kind == "qid":
                name = part.text[1:-1].lower()
            else:
                name = part.lower
        t = self.peek()
        if t is not None and t.kind == "sym" and t.text == "(":
            return self._function_call(name)
        return name

    def _function_call(self, name: str) -> str:
        self.advance()  # '('
        args: list[str] = []
        prev_value = False
        while True:
            tok = self.peek()
            if tok is None:
                raise self._err(tok, f"unterminated argument list for {name}()")
            if tok.kind == "sym" and tok.text == ")":
                self.advance()
                break
            if tok.kind == "sym" and tok.text == ",":
                self.advance()
                prev_value = False
                continue
            if tok.kind in ("num", "str"):
                self.advance()
                prev_value = True
                continue
            if tok.is_kw("distinct", "all", "null", "true", "false"):
                self.advance()
                continue
            if tok.kind == "sym" and tok.text == "*" and not prev_value:
                self.advance()
                args.append("*")
                prev_value = True
                continue
            if tok.kind == "sym" and (tok.text in _OPERATOR_SYMS or tok.text == "*"):
                self.advance()
                prev_value = False
                continue
            if tok.kind in ("word", "qid"):
                args.append(self._atom())
                prev_value = True
                continue
            if tok.kind == "sym" and tok.text == "(":
                # parenthesized arithmetic inside an argument
                self.advance()
                depth = 1
                while depth:
                    inner = self.peek()
                    if inner is None:
                        raise self._err(inner, "unbalanced parentheses")
                    self.advance()
                    if inner.kind == "sym" and inner.text == "(":
                        depth += 1
                    elif inner.kind == "sym" and inner.text == ")":
                        depth -= 1
                prev_value = True
                continue
            raise self._err(tok, f"unexpected {tok.text!r} in argument list")
        return f"{name}({','.join(args)})"

    # -- select / group by / order by items --------------------------------

    def _item_list(self, allow_alias: bool) -> list[str]:
        payloads: list[str] = []
        expect_item = True
        while True:
            if self._at_boundary():
                if expect_item:
                    raise self._err(self.peek(), "expected expression")
                break
            payload = self._item(allow_alias)
            if payload is not None:
                payloads.append(payload)
            expect_item = False
            tok = self.peek()
            if tok is not None and tok.kind == "sym" and tok.text == ",":
                self.advance()
                expect_item = True
                continue
            break
        return payloads

    def _item(self, allow_alias: bool) -> Optional[str]:
        """One expression; returns the first column/function payload or
        None when the item is a pure literal."""
        first: Optional[str] = None
        prev_value = False
        depth = 0
        consumed = False
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "sym" and tok.text in (",", ";"):
                if depth > 0 and tok.text == ",":
                    self.advance()
                    prev_value = False
                    continue
                break
            if tok.kind == "word" and tok.lower in _CLAUSE_BOUNDARY:
                if depth > 0:
                    raise self._err(tok, "unbalanced parentheses")
                break
            consumed = True
            if tok.kind in ("num", "str"):
                self.advance()
                prev_value = True
                continue
            if tok.is_kw("as"):
                self.advance()
                alias = self.peek()
                if alias is None or alias.kind not in ("word", "qid"):
                    raise self._err(alias, "expected alias after AS")
                self.advance()
                prev_value = True
                continue
            if tok.is_kw("null", "true", "false"):
                self.advance()
                prev_value = True
                continue
            if tok.is_kw("asc", "desc") and not allow_alias:
                self.advance()
                continue
            if tok.is_kw("case"):
                raise self._err(tok, "CASE expressions are not supported")
            if tok.kind == "word" and tok.lower in _KEYWORDS:
                raise self._err(tok, f"unexpected keyword {tok.text.upper()}")
            if tok.kind in ("word", "qid"):
                if prev_value and allow_alias:
                    self.advance()  # implicit column alias
                    continue
                if prev_value:
                    raise self._err(tok, f"unexpected identifier {tok.text!r}")
                payload = self._atom()
                if first is None:
                    first = payload
                prev_value = True
                continue
            if tok.kind == "sym":
                if tok.text == "(":
                    nxt = self.peek(1)
                    if nxt is not None and nxt.is_kw("select"):
                        raise UnsupportedStatement("subqueries are not supported")
                    self.advance()
                    depth += 1
                    prev_value = False
                    continue
                if tok.text == ")":
                    if depth == 0:
                        break
                    self.advance()
                    depth -= 1
                    prev_value = True
                    continue
                if tok.text == "*":
                    self.advance()
                    if not prev_value:
                        if first is None:
                            first = "*"
                        prev_value = True
                    else:
                        prev_value = False
                    continue
                if tok.text in _OPERATOR_SYMS:
                    self.advance()
                    prev_value = False
                    continue
                raise self._err(tok, f"unexpected {tok.text!r}")
            raise self._err(tok, f"unexpected {tok.text!r}")
        if depth > 0:
            raise self._err(self.peek(), "unbalanced parentheses")
        if not consumed:
            raise self._err(self.peek(), "expected expression")
        return first

    # -- FROM --------------------------------------------------------------

    def _from_clause(self) -> list[ClauseUnit]:
        units: list[ClauseUnit] = []
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == "sym" and tok.text == "(":
                raise UnsupportedStatement("derived tables are not supported")
            if tok is None or tok.kind not in ("word", "qid") or (
                tok.kind == "word" and tok.lower in _KEYWORDS
            ):
                raise self._err(tok, "expected table name")
            table = self._table_name()
            units.append(ClauseUnit(Clause.FROM, table))
            self._maybe_alias()
            tok = self.peek()
            if tok is not None and tok.kind == "sym" and tok.text == ",":
                self.advance()
                continue
            if tok is not None and tok.kind == "word" and tok.lower in _JOIN_WORDS:
                self._consume_join_words()
                continue
            if tok is not None and tok.is_kw("on"):
                self.advance()
                for payload in self._condition(extra_stop=_JOIN_WORDS):
                    units.append(ClauseUnit(Clause.WHERE, payload))
                tok = self.peek()
                if tok is not None and tok.kind == "word" and tok.lower in _JOIN_WORDS:
                    self._consume_join_words()
                    continue
                break
            if tok is not None and tok.is_kw("using"):
                self.advance()
                for col in self._using_columns():
                    units.append(ClauseUnit(Clause.WHERE, col))
                tok = self.peek()
                if tok is not None and tok.kind == "word" and tok.lower in _JOIN_WORDS:
                    self._consume_join_words()
                    continue
                break
            break
        return units

    def _table_name(self) -> str:
        tok = self.advance()
        name = tok.text[1:-1].lower() if tok.kind == "qid" else tok.lower
        while (t := self.peek()) is not None and t.kind == "sym" and t.text == ".":
            self.advance()
            part = self.peek()
            if part is None or part.kind not in ("word", "qid"):
                raise self._err(part, "expected identifier after '.'")
            part = self.advance()
            name = part.text[1:-1].lower() if part.kind == "qid" else part.lower
        return name

    def _maybe_alias(self) -> None:
        tok = self.peek()
        if tok is None:
            return
        if tok.is_kw("as"):
            self.advance()
            alias = self.peek()
            if alias is None or alias.kind not in ("word", "qid"):
                raise self._err(alias, "expected alias after AS")
            self.advance()
            return
        if tok.kind in ("word", "qid") and not (
            tok.kind == "word" and tok.lower in _KEYWORDS
        ):
            self.advance()

    def _consume_join_words(self) -> None:
        while (t := self.peek()) is not None and t.kind == "word" and t.lower in (
            _JOIN_WORDS | {"outer"}
        ):
            last = t.lower
            self.advance()
            if last == "join":
                return
        raise self._err(self.peek(), "expected JOIN")

    def _using_columns(self) -> list[str]:
        tok = self.peek()
        if tok is None or tok.kind != "sym" or tok.text != "(":
            raise self._err(tok, "expected '(' after USING")
        self.advance()
        cols: list[str] = []
        while True:
            tok = self.peek()
            if tok is None:
                raise self._err(tok, "unterminated USING list")
            if tok.kind == "sym" and tok.text == ")":
                self.advance()
                return cols
            if tok.kind == "sym" and tok.text == ",":
                self.advance()
                continue
            if tok.kind in ("word", "qid"):
                cols.append(self._atom())
                continue
            raise self._err(tok, f"unexpected {tok.text!r} in USING list")

    # -- conditions --------------------------------------------------------

    def _condition(self, extra_stop: set[str] = frozenset()) -> list[str]:
        """Flatten a boolean condition into per-predicate payloads.

        AND/OR split predicates at any paren depth (parens are transparent
        for splitting); each predicate reduces to its leading column
        reference; predicates with no column reference are dropped.
        """
        payloads: list[str] = []
        first: Optional[str] = None
        prev_value = False
        depth = 0
        between_pending = 0
        consumed = False

        def flush() -> None:
            nonlocal first, prev_value
            if first is not None:
                payloads.append(first)
            first = None
            prev_value = False

        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok.kind == "sym" and tok.text == ";":
                break
            if tok.kind == "word" and (
                tok.lower in _CLAUSE_BOUNDARY
                or (depth == 0 and tok.lower in extra_stop)
            ):
                if depth > 0:
                    raise self._err(tok, "unbalanced parentheses")
                break
            consumed = True
            if tok.is_kw("and"):
                self.advance()
                if between_pending > 0:
                    between_pending -= 1
                    prev_value = False
                else:
                    flush()
                continue
            if tok.is_kw("or"):
                self.advance()
                flush()
                continue
            if tok.is_kw("not"):
                self.advance()
                continue
            if tok.is_kw("between"):
                self.advance()
                between_pending += 1
                prev_value = False
                continue
            if tok.is_kw("in"):
                self.advance()
                self._skip_in_list()
                prev_value = True
                continue
            if tok.is_kw("exists"):
                raise UnsupportedStatement("subqueries are not supported")
            if tok.is_kw("is"):
                self.advance()
                nxt = self.peek()
                if nxt is not None and nxt.is_kw("not"):
                    self.advance()
                    nxt = self.peek()
                if nxt is None or not nxt.is_kw("null", "true", "false"):
                    raise self._err(nxt, "expected NULL after IS")
                self.advance()
                prev_value = True
                continue
            if tok.is_kw("like", "escape"):
                self.advance()
                prev_value = False
                continue
            if tok.is_kw("null", "true", "false"):
                self.advance()
                prev_value = True
                continue
            if tok.is_kw("case"):
                raise self._err(tok, "CASE expressions are not supported")
            if tok.kind == "word" and tok.lower in _KEYWORDS:
                raise self._err(tok, f"unexpected keyword {tok.text.upper()}")
            if tok.kind in ("num", "str"):
                self.advance()
                prev_value = True
                continue
            if tok.kind in ("word", "qid"):
                if prev_value:
                    raise self._err(tok, f"unexpected identifier {tok.text!r}")
                payload = self._atom()
                if first is None:
                    first = payload
                prev_value = True
                continue
            if tok.kind == "sym":
                if tok.text == "(":
                    nxt = self.peek(1)
                    if nxt is not None and nxt.is_kw("select"):
                        raise UnsupportedStatement("subqueries are not supported")
                    self.advance()
                    depth += 1
                    prev_value = False
                    continue
                if tok.text == ")":
                    if depth == 0:
                        break
                    self.advance()
                    depth -= 1
                    prev_value = True
                    continue
                if tok.text == "*":
                    self.advance()
                    prev_value = False
                    continue
                if tok.text in _OPERATOR_SYMS:
                    self.advance()
                    prev_value = False
                    continue
                if tok.text == ",":
                    if depth > 0:
                        self.advance()
                        prev_value = False
                        continue
                    raise self._err(tok, "unexpected ',' in condition")
                raise self._err(tok, f"unexpected {tok.text!r}")
            raise self._err(tok, f"unexpected {tok.text!r}")
        if depth > 0:
            raise self._err(self.peek(), "unbalanced parentheses")
        if not consumed:
            raise self._err(self.peek(), "expected condition")
        flush()
        return payloads

    def _skip_in_list(self) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "sym" or tok.text != "(":
            raise self._err(tok, "expected '(' after IN")
        nxt = self.peek(1)
        if nxt is not None and nxt.is_kw("select"):
            raise UnsupportedStatement("subqueries are not supported")
        self.advance()
        depth = 1
        while depth:
            tok = self.peek()
            if tok is None:
                raise self._err(tok, "unterminated IN list")
            self.advance()
            if tok.kind == "sym" and tok.text == "(":
                depth += 1
            elif tok.kind == "sym" and tok.text == ")":
                depth -= 1

    # -- trailing clauses --------------------------------------------------

    def _trailing_clauses(self) -> list[ClauseUnit]:
        units: list[ClauseUnit] = []
        while True:
            tok = self.peek()
            if tok is None:
                return units
            if tok.kind == "sym" and tok.text == ";":
                self.advance()
                tok = self.peek()
                if tok is not None:
                    raise self._err(tok, "trailing input after ';'")
                return units
            if tok.is_kw("union", "intersect", "except"):
                raise UnsupportedStatement("set operations are not supported")
            if tok.is_kw("limit", "offset", "fetch"):
                units.append(ClauseUnit(Clause.OTHER, tok.lower))
                self.advance()
                while (t := self.peek()) is not None and (
                    t.kind == "num"
                    or (t.kind == "sym" and t.text == ",")
                    or t.is_kw("row", "rows", "only", "first", "next")
                ):
                    self.advance()
                continue
            raise self._err(tok, f"unexpected {tok.text!r}")


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------

def normalize(raw: str) -> list[ClauseUnit]:
    """Parse a SELECT statement into normalized clause units.

    Raises ParseError for malformed SQL and UnsupportedStatement for
    non-SELECT statements or unsupported constructs (subqueries, CASE,
    set operations).
    """
    return _Parser(_lex(raw), raw).parse()


def _split_columns(payload: str) -> list[str]:
    """Split a payload on top-level commas (function parens are opaque)."""
    pieces = []
    depth = 0
    start = 0
    for i, ch in enumerate(payload):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            pieces.append(payload[start:i])
            start = i + 1
    pieces.append(payload[start:])
    return [p.strip() for p in pieces if p.strip()]


def tokenize(units: list[ClauseUnit], query_id: str = "") -> TokenizedQuery:
    """Turn clause units into clause-qualified terms, in source order."""
    if not units:
        raise EmptyQuery("query produced no clause units")
    terms = []
    for unit in units:
        for column in _split_columns(unit.payload):
            terms.append(f"{unit.clause.keyword} {column}")
    if not terms:
        raise EmptyQuery("query produced no terms")
    return TokenizedQuery(id=query_id, terms=tuple(terms))


def tokenize_query(query: Query) -> TokenizedQuery:
    return tokenize(normalize(query.text), query_id=query.id)


def render(units: list[ClauseUnit]) -> str:
    """Reconstruct a parseable SELECT from clause units.

    normalize(render(normalize(x))) == normalize(x): payloads carry no
    literals or aliases, so re-parsing is a fixed point.
    """
    groups: dict[Clause, list[str]] = {}
    for unit in units:
        groups.setdefault(unit.clause, []).append(unit.payload)
    parts = []
    if Clause.SELECT in groups:
        parts.append("SELECT " + ", ".join(groups[Clause.SELECT]))
    if Clause.FROM in groups:
        parts.append("FROM " + ", ".join(groups[Clause.FROM]))
    if Clause.WHERE in groups:
        parts.append("WHERE " + " AND ".join(groups[Clause.WHERE]))
    if Clause.GROUP_BY in groups:
        parts.append("GROUP BY " + ", ".join(groups[Clause.GROUP_BY]))
    if Clause.HAVING in groups:
        parts.append("HAVING " + " AND ".join(groups[Clause.HAVING]))
    if Clause.ORDER_BY in groups:
        parts.append("ORDER BY " + ", ".join(groups[Clause.ORDER_BY]))
    for payload in groups.get(Clause.OTHER, []):
        parts.append(payload.upper())
    return " ".join(parts)


# --------------------------------------------------------------------------
# Query set files: one query per line, "id \t qep_hash-or-dash \t sql"
# --------------------------------------------------------------------------

def read_query_file(path) -> list[Query]:
    queries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t", 2)
            if len(fields) != 3:
                raise ParseError(lineno, f"expected 3 tab-separated fields, got {len(fields)}")
            qid, qep, sql = fields
            if not qid or not sql:
                raise ParseError(lineno, "empty id or SQL text")
            if qid in seen:
                raise ParseError(lineno, f"duplicate query id {qid!r}")
            seen.add(qid)
            queries.append(Query(id=qid, text=sql, qep_hash=None if qep == "-" else qep))
    return queries


def write_query_file(path, queries: list[Query]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(f"{q.id}\t{q.qep_hash if q.qep_hash is not None else '-'}\t{q.text}\n")
