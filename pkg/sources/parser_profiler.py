"""
Parsing stage: tokenize raw field values against the lexicons and profile
the formats found in each field.
"""

import re
from collections import Counter
from typing import Iterable, List, Optional, Tuple

from sources.lexicons import Lexicons, normalize_entry
from sources.logger import Logger
from sources.schemas import FieldKind, FieldProfile, RawRecord, Token, TokenClass

logger = Logger("parser_profiler.log")

GENERAL_TOKEN = re.compile(r"\d+|[^\W\d_]+(?:['\-][^\W\d_]+)*\.?|\S")
IDENTIFIER_TOKEN = re.compile(r"[0-9A-Za-z]+|\S")
INITIAL_PATTERN = re.compile(r"^[^\W\d_]\.?$")

SEPARATORS = frozenset(",;:/.-#&()")
ORDINAL_SUFFIXES = frozenset(("st", "nd", "rd", "th"))
NUMERIC_CLASSES = (TokenClass.NUMBER, TokenClass.DATE_PART, TokenClass.ZIP)

PATTERN_SYMBOLS = {
    TokenClass.WORD: "W",
    TokenClass.INITIAL: "I",
    TokenClass.TITLE: "T",
    TokenClass.ORDINAL_SUFFIX: "O",
    TokenClass.STATE_CODE: "S",
    TokenClass.STREET_TYPE: "R",
    TokenClass.COUNTRY: "C",
    TokenClass.UNKNOWN: "?",
}

def _classify_other(text: str) -> TokenClass:
    return TokenClass.SEPARATOR if text in SEPARATORS else TokenClass.UNKNOWN

def _classify_name(text: str, lexicons: Lexicons) -> TokenClass:
    if text.isdigit():
        return TokenClass.NUMBER
    if not text[0].isalpha():
        return _classify_other(text)
    if lexicons.is_title(text):
        return TokenClass.TITLE
    if INITIAL_PATTERN.match(text):
        return TokenClass.INITIAL
    return TokenClass.WORD

def _classify_address(text: str, previous: Optional[Token], lexicons: Lexicons) -> TokenClass:
    if text.isdigit():
        return TokenClass.ZIP if lexicons.is_postal_code(text) else TokenClass.NUMBER
    if not text[0].isalpha():
        return _classify_other(text)
    if previous is not None and previous.token_class == TokenClass.NUMBER and text.lower() in ORDINAL_SUFFIXES:
        return TokenClass.ORDINAL_SUFFIX
    # "CT" is a state, "Ct" or "ct" a court
    if text.isupper() and lexicons.is_state_code(text):
        return TokenClass.STATE_CODE
    if lexicons.street_type(text):
        return TokenClass.STREET_TYPE
    if lexicons.is_state_code(text):
        return TokenClass.STATE_CODE
    if lexicons.is_country(text):
        return TokenClass.COUNTRY
    return TokenClass.WORD

def _classify(text: str, kind: FieldKind, previous: Optional[Token], lexicons: Lexicons) -> TokenClass:
    if kind == FieldKind.PERSON_NAME:
        return _classify_name(text, lexicons)
    if kind == FieldKind.ADDRESS:
        return _classify_address(text, previous, lexicons)
    if text.isdigit():
        return TokenClass.DATE_PART if kind == FieldKind.DATE else TokenClass.NUMBER
    if text[0].isalnum():
        return TokenClass.WORD
    return _classify_other(text)

def tokenize(value: str, kind: FieldKind, lexicons: Lexicons) -> List[Token]:
    """
    Split a raw value into classified tokens.
    Every non-whitespace character belongs to exactly one token, so the value
    is rebuilt from the token spans and the whitespace between them.
    Args:
        value (str): The raw value, never MISSING
        kind (FieldKind): The schema kind of the field
        lexicons (Lexicons): Titles, street types, state codes, countries, postal codes
    Returns:
        List[Token]: ordered, non-overlapping tokens
    """
    pattern = IDENTIFIER_TOKEN if kind == FieldKind.IDENTIFIER else GENERAL_TOKEN
    tokens = []
    previous = None
    for match in pattern.finditer(value):
        text = match.group(0)
        token = Token(text=text, token_class=_classify(text, kind, previous, lexicons), span=match.span())
        tokens.append(token)
        previous = token
    return tokens

def reassemble(value: str, tokens: List[Token]) -> str:
    """Join token texts with the original characters found between their spans."""
    parts = []
    position = 0
    for token in tokens:
        start, end = token.span
        parts.append(value[position:start])
        parts.append(token.text)
        position = end
    parts.append(value[position:])
    return "".join(parts)

def pattern_of(tokens: List[Token]) -> str:
    """Format pattern of a value, e.g. "NN/NN/NNNN" for "12/23/1987"."""
    parts = []
    position = None
    for token in tokens:
        start, end = token.span
        if position is not None and start > position:
            parts.append(" ")
        if token.token_class in NUMERIC_CLASSES:
            parts.append("N" * len(token.text))
        elif token.token_class == TokenClass.SEPARATOR:
            parts.append(token.text)
        else:
            parts.append(PATTERN_SYMBOLS[token.token_class])
        position = end
    return "".join(parts)

def profile_field(records: Iterable[RawRecord], field: str,
                  kind: FieldKind = FieldKind.FREE_TEXT,
                  lexicons: Optional[Lexicons] = None) -> FieldProfile:
    """
    Build the pattern histogram of one field over a dataset.
    Args:
        records: The raw records
        field (str): The schema field name
        kind (FieldKind): How values of the field are tokenized
        lexicons (Lexicons, optional): Defaults to empty lexicons
    Returns:
        FieldProfile: pattern counts + missing count always sum to the record count
    """
    lexicons = lexicons or Lexicons()
    histogram = Counter()
    distinct = set()
    missing = 0
    for record in records:
        value = record.values.get(field)
        if value is None:
            missing += 1
            continue
        distinct.add(value)
        histogram[pattern_of(tokenize(value, kind, lexicons))] += 1
    profile = FieldProfile(field=field, pattern_histogram=dict(histogram),
                           distinct_count=len(distinct), missing_count=missing)
    logger.info(f"Profiled {field}: {len(histogram)} patterns, {missing} missing")
    return profile

def profile_dataset(records: List[RawRecord], schema, lexicons: Optional[Lexicons] = None) -> List[FieldProfile]:
    return [profile_field(records, field.name, field.kind, lexicons) for field in schema]

def street_key(tokens: List[Token], lexicons: Lexicons) -> Tuple[str, ...]:
    """
    Comparison key of a street: lowercase words without trailing dots, street
    types replaced by their canonical form and ordinals fused ("6", "th" -> "6th").
    Display strings keep the split ordinal; only keys are fused.
    """
    key = []
    for index, token in enumerate(tokens):
        if token.token_class in (TokenClass.SEPARATOR, TokenClass.COUNTRY, TokenClass.ORDINAL_SUFFIX):
            continue
        if token.token_class == TokenClass.STREET_TYPE:
            key.append(lexicons.street_type(token.text) or normalize_entry(token.text))
            continue
        text = normalize_entry(token.text)
        following = tokens[index + 1] if index + 1 < len(tokens) else None
        if following is not None and following.token_class == TokenClass.ORDINAL_SUFFIX:
            text += following.text.lower()
        key.append(text)
    return tuple(key)

def street_key_of(street: str, lexicons: Lexicons) -> Tuple[str, ...]:
    return street_key(tokenize(street, FieldKind.ADDRESS, lexicons), lexicons)
