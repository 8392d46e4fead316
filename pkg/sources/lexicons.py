"""
Editable metadata used by the parser: titles, street types, state codes,
given names and country names, one entry per line with "#" comments.
"""

import os
import dataclasses
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional

from sources.errors import ConfigInvalidError
from sources.logger import Logger

logger = Logger("lexicons.log")

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DEFAULT_LEXICON_DIR = os.path.join(PROJECT_ROOT, "data", "lexicons")

def normalize_entry(text: str) -> str:
    return text.strip().lower().rstrip('.')

def read_lexicon_file(path: str) -> List[str]:
    """
    Read one lexicon file.
    Args:
        path (str): The lexicon path
    Returns:
        List[str]: non-empty lines with comments removed
    """
    entries = []
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for line in f:
                line = line.split('#', 1)[0].strip()
                if line:
                    entries.append(line)
    except OSError as e:
        raise ConfigInvalidError(f"cannot read lexicon {path}: {e}")
    return entries

@dataclass(frozen=True)
class Lexicons:
    titles: FrozenSet[str] = frozenset()
    # normalized alias -> canonical street type ("ave" -> "avenue")
    street_types: Dict[str, str] = field(default_factory=dict)
    state_codes: FrozenSet[str] = frozenset()
    given_names: FrozenSet[str] = frozenset()
    countries: FrozenSet[str] = frozenset()
    # filled from the gazetteer; when empty any 5-digit number counts as a zip
    postal_codes: FrozenSet[str] = frozenset()
    cities: FrozenSet[str] = frozenset()

    def is_title(self, text: str) -> bool:
        return normalize_entry(text) in self.titles

    def street_type(self, text: str) -> Optional[str]:
        return self.street_types.get(normalize_entry(text))

    def is_state_code(self, text: str) -> bool:
        return len(text) == 2 and text.upper() in self.state_codes

    def is_given_name(self, text: str) -> bool:
        return normalize_entry(text) in self.given_names

    def is_country(self, text: str) -> bool:
        return normalize_entry(text) in self.countries

    def is_postal_code(self, text: str) -> bool:
        if len(text) != 5 or not text.isdigit():
            return False
        return not self.postal_codes or text in self.postal_codes

    def is_known_city(self, text: str) -> bool:
        return text.strip().lower() in self.cities

    def with_gazetteer(self, gazetteer) -> "Lexicons":
        """Attach the postal codes and city names of a gazetteer."""
        return dataclasses.replace(
            self,
            postal_codes=frozenset(gazetteer.entries.keys()),
            cities=frozenset(entry.city.lower() for entry in gazetteer.entries.values()),
        )

def parse_street_types(lines: List[str]) -> Dict[str, str]:
    """Each line lists a canonical street type followed by its aliases."""
    table = {}
    for line in lines:
        variants = [normalize_entry(word) for word in line.split()]
        canonical = variants[0]
        for variant in variants:
            table[variant] = canonical
    return table

def load_lexicons(titles: str, street_types: str, state_codes: str,
                  given_names: str, countries: str) -> Lexicons:
    lexicons = Lexicons(
        titles=frozenset(normalize_entry(e) for e in read_lexicon_file(titles)),
        street_types=parse_street_types(read_lexicon_file(street_types)),
        state_codes=frozenset(e.strip().upper() for e in read_lexicon_file(state_codes)),
        given_names=frozenset(normalize_entry(e) for e in read_lexicon_file(given_names)),
        countries=frozenset(normalize_entry(e) for e in read_lexicon_file(countries)),
    )
    logger.info(f"Loaded lexicons: {len(lexicons.titles)} titles, {len(lexicons.street_types)} street types, "
                f"{len(lexicons.state_codes)} states, {len(lexicons.given_names)} given names")
    return lexicons

def load_default_lexicons(directory: str = DEFAULT_LEXICON_DIR) -> Lexicons:
    return load_lexicons(
        titles=os.path.join(directory, "titles.txt"),
        street_types=os.path.join(directory, "street_types.txt"),
        state_codes=os.path.join(directory, "state_codes.txt"),
        given_names=os.path.join(directory, "given_names.txt"),
        countries=os.path.join(directory, "countries.txt"),
    )
