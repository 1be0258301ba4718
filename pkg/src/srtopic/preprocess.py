"""Serbian-aware preprocessing of short texts.

Two levels are supported: partial (transliteration + cleaning +
tokenization) and full (partial + lemma-table lookup). Stopwords are
deliberately not touched here; they are filtered later when the
vocabulary is built.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import DataError, MissingTable

# Serbian Cyrillic -> Serbian Latin, single-codepoint letters only.
# The digraph sources (Љ/Њ/Џ and lowercase forms) are handled separately
# because their Latin spelling is case-context dependent.
_CYR_TO_LAT = {
    "А": "A", "а": "a",
    "Б": "B", "б": "b",
    "В": "V", "в": "v",
    "Г": "G", "г": "g",
    "Д": "D", "д": "d",
    "Ђ": "Đ", "ђ": "đ",
    "Е": "E", "е": "e",
    "Ж": "Ž", "ж": "ž",
    "З": "Z", "з": "z",
    "И": "I", "и": "i",
    "Ј": "J", "ј": "j",
    "К": "K", "к": "k",
    "Л": "L", "л": "l",
    "М": "M", "м": "m",
    "Н": "N", "н": "n",
    "О": "O", "о": "o",
    "П": "P", "п": "p",
    "Р": "R", "р": "r",
    "С": "S", "с": "s",
    "Т": "T", "т": "t",
    "Ћ": "Ć", "ћ": "ć",
    "У": "U", "у": "u",
    "Ф": "F", "ф": "f",
    "Х": "H", "х": "h",
    "Ц": "C", "ц": "c",
    "Ч": "Č", "ч": "č",
    "Ш": "Š", "ш": "š",
    "љ": "lj",
    "њ": "nj",
    "џ": "dž",
}

# Uppercase digraph letters: (title-case form, all-caps form).
_DIGRAPH_UPPER = {
    "Љ": ("Lj", "LJ"),
    "Њ": ("Nj", "NJ"),
    "Џ": ("Dž", "DŽ"),
}

_URL_RE = re.compile(r"\b(?:https?|www)\S*", re.IGNORECASE)
_MENTION_RE = re.compile(r"@\w+")

# Emoji removal by Unicode block: emoticons, misc symbols & pictographs,
# transport & map symbols, supplemental symbols & pictographs, and
# regional-indicator (flag) pairs.
_EMOJI_RE = re.compile(
    "["
    "\U0001F600-\U0001F64F"
    "\U0001F300-\U0001F5FF"
    "\U0001F680-\U0001F6FF"
    "\U0001F900-\U0001F9FF"
    "\U0001F1E6-\U0001F1FF"
    "]+"
)

# Latin-script letter ranges kept by clean(): ASCII, Latin-1 letters,
# Latin Extended-A/B (covers č ć ž š đ), Latin Extended Additional.
_LATIN_RANGES = (
    (0x0041, 0x005A),
    (0x0061, 0x007A),
    (0x00C0, 0x024F),
    (0x1E00, 0x1EFF),
)


@dataclass
class RawDocument:
    id: str
    text: str


@dataclass
class CleanDocument:
    id: str
    tokens: list[str]

    @property
    def empty(self) -> bool:
        return not self.tokens


@dataclass
class CleanCorpus:
    docs: list[CleanDocument]
    level: str = "partial"

    def __len__(self) -> int:
        return len(self.docs)

    @property
    def doc_ids(self) -> list[str]:
        return [d.id for d in self.docs]

    @property
    def empty_doc_ids(self) -> list[str]:
        return [d.id for d in self.docs if d.empty]


@dataclass
class PreprocessConfig:
    level: str = "partial"
    lemma_table_path: str | None = None

    def __post_init__(self) -> None:
        if self.level not in ("partial", "full"):
            raise ValueError(f"unknown preprocessing level {self.level!r}")


def transliterate(text: str) -> str:
    """Convert Serbian Cyrillic to Serbian Latin, leaving everything else alone.

    Uppercase digraph letters become fully uppercase (LJ/NJ/DŽ) when the
    next character is an uppercase letter, title-case (Lj/Nj/Dž) otherwise.
    """
    out = []
    n = len(text)
    for i, ch in enumerate(text):
        digraph = _DIGRAPH_UPPER.get(ch)
        if digraph is not None:
            title, caps = digraph
            nxt = text[i + 1] if i + 1 < n else ""
            out.append(caps if nxt.isalpha() and nxt.isupper() else title)
        else:
            out.append(_CYR_TO_LAT.get(ch, ch))
    return "".join(out)


def _is_latin_letter(ch: str) -> bool:
    cp = ord(ch)
    for lo, hi in _LATIN_RANGES:
        if lo <= cp <= hi:
            return ch.isalpha()
    return False


def clean(text: str) -> str:
    """Strip tweet noise down to lowercase Latin words separated by single spaces.

    Expects already-transliterated input. Removes URLs, @-mentions and
    emoji; keeps hashtag words with the '#' stripped; everything that is
    not a Latin-script letter (digits, punctuation, symbols, leftover
    non-Latin scripts) becomes a word boundary.
    """
    text = _URL_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = text.replace("#", "")
    text = _EMOJI_RE.sub("", text)
    text = text.lower()
    out = [ch if _is_latin_letter(ch) else " " for ch in text]
    return " ".join("".join(out).split())


def tokenize(text: str) -> list[str]:
    """Split cleaned text on whitespace, dropping empties."""
    return text.split()


def lemmatize(tokens: list[str], table: dict[str, str]) -> list[str]:
    """Replace each token by its lemma where the table has one."""
    return [table.get(t, t) for t in tokens]


def load_lemma_table(path: str | Path) -> dict[str, str]:
    """Read a surface<TAB>lemma file; later duplicates win, other lines are skipped."""
    table: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if "\t" not in line:
                continue
            surface, lemma = line.split("\t", 1)
            surface = surface.strip().lower()
            lemma = lemma.strip().lower()
            if surface and lemma:
                table[surface] = lemma
    return table


def preprocess_corpus(docs: list[RawDocument], cfg: PreprocessConfig) -> CleanCorpus:
    """Run the configured pipeline over a corpus, preserving document order.

    Documents whose token list ends up empty are kept (flagged via
    CleanDocument.empty) so downstream stages can decide what to do
    with them.
    """
    seen: set[str] = set()
    for doc in docs:
        if doc.id in seen:
            raise DataError(f"duplicate document id {doc.id!r}")
        seen.add(doc.id)

    table: dict[str, str] | None = None
    if cfg.level == "full":
        if cfg.lemma_table_path is None:
            raise MissingTable("full preprocessing requires a lemma table path")
        table = load_lemma_table(cfg.lemma_table_path)

    out = []
    for doc in docs:
        tokens = tokenize(clean(transliterate(doc.text)))
        if table is not None:
            tokens = lemmatize(tokens, table)
        out.append(CleanDocument(id=doc.id, tokens=tokens))
    return CleanCorpus(docs=out, level=cfg.level)


def read_raw_corpus(path: str | Path) -> list[RawDocument]:
    """One document per line; a leading id<TAB> prefix is optional.

    Lines without a tab get synthetic ids d0, d1, ... by line position.
    """
    docs = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh.read().splitlines()):
            if "\t" in line:
                doc_id, text = line.split("\t", 1)
            else:
                doc_id, text = f"d{i}", line
            docs.append(RawDocument(id=doc_id, text=text))
    return docs


def write_clean_corpus(corpus: CleanCorpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus.docs:
            fh.write(f"{doc.id}\t{' '.join(doc.tokens)}\n")


def read_clean_corpus(path: str | Path, level: str = "partial") -> CleanCorpus:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh.read().splitlines()):
            if "\t" not in line:
                raise DataError(f"{path}: line {i + 1} has no id<TAB>tokens separator")
            doc_id, rest = line.split("\t", 1)
            docs.append(CleanDocument(id=doc_id, tokens=rest.split()))
    return CleanCorpus(docs=docs, level=level)
