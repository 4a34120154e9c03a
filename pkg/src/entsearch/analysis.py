"""Text analysis chain shared by indexing, linking, and window counting.

Every token count in the toolkit (document lengths, window boundaries,
gazetteer matching) flows through one Analyzer so the pieces agree on what
a token is. The chain is: Unicode word extraction, lowercase folding,
optional accent folding, optional stopword removal, optional Porter-style
stemming. Stemming and folding are off by default because expansion terms,
in particular 32-hex entity hashes, must survive analysis unchanged.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

# Unicode word characters minus underscore: ASCII alphanumerics stay intact,
# so hashed entity tokens are never split or mutated.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)
_HEX32_RE = re.compile(r"[0-9a-f]{32}\Z")


@dataclass(frozen=True)
class AnalyzerConfig:
    stem: bool = False
    fold_accents: bool = False
    stopwords: frozenset[str] = frozenset()

    def to_dict(self) -> dict:
        return {
            "stem": self.stem,
            "fold_accents": self.fold_accents,
            "stopwords": sorted(self.stopwords),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnalyzerConfig":
        return cls(
            stem=bool(d.get("stem", False)),
            fold_accents=bool(d.get("fold_accents", False)),
            stopwords=frozenset(d.get("stopwords", ())),
        )


class Analyzer:
    """Deterministic tokenizer: same text and config, same tokens, always."""

    def __init__(self, config: AnalyzerConfig | None = None):
        self.config = config or AnalyzerConfig()

    def scan(self, text: str) -> list[tuple[str, int, int]]:
        """Return (term, char_start, char_end) for every emitted token.

        Spans index the original text; terms are the normalized forms.
        """
        cfg = self.config
        out = []
        for m in _TOKEN_RE.finditer(text):
            term = m.group().lower()
            if cfg.fold_accents:
                term = _fold_accents(term)
                if not term:
                    continue
            if term in cfg.stopwords:
                continue
            if cfg.stem:
                term = _stem_guarded(term)
            out.append((term, m.start(), m.end()))
        return out

    def tokens(self, text: str) -> list[str]:
        return [term for term, _, _ in self.scan(text)]

    def token_spans(self, text: str) -> list[tuple[int, int]]:
        return [(s, e) for _, s, e in self.scan(text)]


DEFAULT_ANALYZER = Analyzer()


def analyze(text: str) -> list[str]:
    """Tokenize with the default configuration (lowercase, no stemming)."""
    return DEFAULT_ANALYZER.tokens(text)


def _fold_accents(term: str) -> str:
    decomposed = unicodedata.normalize("NFKD", term)
    return "".join(c for c in decomposed if unicodedata.category(c) != "Mn")


def _stem_guarded(term: str) -> str:
    # Entity hashes and mixed tokens must pass through untouched.
    if len(term) == 32 and _HEX32_RE.match(term):
        return term
    if not term.isascii() or not term.isalpha():
        return term
    return porter_stem(term)


# --- Porter stemmer (classic 1980 rule set) ---------------------------------
# No stemming package is available in this environment, so the algorithm is
# implemented here. Operates on lowercase ASCII words only; the guard above
# enforces that.


def _is_cons(word: str, i: int) -> bool:
    c = word[i]
    if c in "aeiou":
        return False
    if c == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem: str) -> int:
    # number of vowel->consonant transitions, i.e. m in [C](VC)^m[V]
    m = 0
    prev_cons = True
    for i in range(len(stem)):
        cons = _is_cons(stem, i)
        if not prev_cons and cons:
            m += 1
        prev_cons = cons
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_cons(stem, i) for i in range(len(stem)))


def _ends_double_cons(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_cons(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    n = len(word)
    if n < 3:
        return False
    return (
        _is_cons(word, n - 3)
        and not _is_cons(word, n - 2)
        and _is_cons(word, n - 1)
        and word[-1] not in "wxy"
    )


def _replace_longest(word: str, pairs: list[tuple[str, str]], min_measure: int) -> str:
    # Porter semantics: pick the longest matching suffix, then test its
    # condition once; a failed condition does not fall through to shorter
    # suffixes.
    for suffix, repl in pairs:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure(stem) > min_measure:
                return stem + repl
            return word
    return word


def _bylen(pairs: list[tuple[str, str]]) -> list[tuple[str, str]]:
    return sorted(pairs, key=lambda p: -len(p[0]))


_STEP2 = _bylen([
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
])

_STEP3 = _bylen([
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
])

_STEP4 = _bylen([
    ("ement", ""), ("ance", ""), ("ence", ""), ("able", ""), ("ible", ""),
    ("ment", ""), ("ent", ""), ("ant", ""), ("ion", ""), ("ism", ""),
    ("ate", ""), ("iti", ""), ("ous", ""), ("ive", ""), ("ize", ""),
    ("al", ""), ("er", ""), ("ic", ""), ("ou", ""),
])


def _step1b_cleanup(word: str) -> str:
    if word.endswith(("at", "bl", "iz")):
        return word + "e"
    if _ends_double_cons(word) and not word.endswith(("l", "s", "z")):
        return word[:-1]
    if _measure(word) == 1 and _ends_cvc(word):
        return word + "e"
    return word


def porter_stem(word: str) -> str:
    """Stem a lowercase ASCII word with the classic Porter rules."""
    if len(word) <= 2:
        return word

    # step 1a
    if word.endswith("sses"):
        word = word[:-2]
    elif word.endswith("ies"):
        word = word[:-2]
    elif word.endswith("ss"):
        pass
    elif word.endswith("s"):
        word = word[:-1]

    # step 1b
    if word.endswith("eed"):
        if _measure(word[:-3]) > 0:
            word = word[:-1]
    elif word.endswith("ed") and _has_vowel(word[:-2]):
        word = _step1b_cleanup(word[:-2])
    elif word.endswith("ing") and _has_vowel(word[:-3]):
        word = _step1b_cleanup(word[:-3])

    # step 1c
    if word.endswith("y") and _has_vowel(word[:-1]):
        word = word[:-1] + "i"

    word = _replace_longest(word, _STEP2, 0)
    word = _replace_longest(word, _STEP3, 0)

    # step 4: plain removal at m > 1, with the s/t gate for "ion"
    for suffix, _ in _STEP4:
        if word.endswith(suffix):
            stem = word[: len(word) - len(suffix)]
            if _measure(stem) > 1 and (suffix != "ion" or stem.endswith(("s", "t"))):
                word = stem
            break

    # step 5a
    if word.endswith("e"):
        m = _measure(word[:-1])
        if m > 1 or (m == 1 and not _ends_cvc(word[:-1])):
            word = word[:-1]

    # step 5b
    if _measure(word) > 1 and _ends_double_cons(word) and word.endswith("l"):
        word = word[:-1]

    return word
