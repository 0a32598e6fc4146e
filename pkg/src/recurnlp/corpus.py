"""Tokenization of raw text and labeled corpus manifests.

Text is treated as a categorical series: every word becomes an integer
code, numbered by first appearance. Recurrence measures only depend on
which positions share a code, so any bijective renumbering is harmless.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import regex

from .errors import ParseError, RangeError

__all__ = [
    "TokenSequence",
    "TokenizeOptions",
    "ManifestEntry",
    "CorpusManifest",
    "tokenize",
    "from_surfaces",
    "slice_words",
    "load_manifest",
    "read_text",
    "surfaces_equal",
]

# Letters, combining marks and digits, plus ASCII and typographic apostrophes.
_WORD_RE = regex.compile(r"[\p{L}\p{M}\p{N}'’]+")
_APOSTROPHES = "'’"

MANIFEST_HEADER = ("doc_id", "path", "label")
LABEL_SEP = "|"


@dataclass(frozen=True)
class TokenizeOptions:
    lowercase: bool = True


@dataclass(frozen=True)
class TokenSequence:
    """Integer-coded word sequence.

    Attributes
    ----------
    tokens : tuple of int
        Token ids, one per word position.
    vocab : tuple of str
        Surface string for each id; ``vocab[i]`` is the word coded ``i``.
    source_id : str
        Opaque document identifier.
    """

    tokens: tuple[int, ...]
    vocab: tuple[str, ...]
    source_id: str = ""

    def __post_init__(self):
        if len(set(self.vocab)) != len(self.vocab):
            raise ValueError("vocabulary surface strings must be unique")
        size = len(self.vocab)
        for t in self.tokens:
            if not 0 <= t < size:
                raise ValueError(f"token id {t} has no vocabulary entry")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def n(self) -> int:
        return len(self.tokens)

    @cached_property
    def ids(self) -> np.ndarray:
        """Token ids as a read-only int64 array."""
        arr = np.asarray(self.tokens, dtype=np.int64)
        arr.setflags(write=False)
        return arr

    def surfaces(self) -> list[str]:
        return [self.vocab[t] for t in self.tokens]

    def id_of(self, surface: str) -> int:
        return self._index[surface]

    @cached_property
    def _index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.vocab)}


def from_surfaces(words: Iterable[str], source_id: str = "") -> TokenSequence:
    """Code a stream of surface strings by order of first appearance."""
    index: dict[str, int] = {}
    tokens = []
    for w in words:
        tid = index.get(w)
        if tid is None:
            tid = index[w] = len(index)
        tokens.append(tid)
    return TokenSequence(tuple(tokens), tuple(index), source_id)


def tokenize(text: str, opts: TokenizeOptions | None = None, source_id: str = "") -> TokenSequence:
    """Split ``text`` into words and code them as a :class:`TokenSequence`.

    A word is a maximal run of letters, combining marks, digits and
    apostrophes. Apostrophes at the edges of a run are quote marks rather
    than part of the word and are trimmed, so ``'tis`` becomes ``tis``
    while ``don't`` stays whole. Everything else separates words.

    >>> tokenize("The cat. The CAT!").tokens
    (0, 1, 0, 1)
    """
    opts = opts or TokenizeOptions()
    if opts.lowercase:
        text = text.lower()
    words = []
    for m in _WORD_RE.finditer(text):
        w = m.group().strip(_APOSTROPHES)
        if w:
            words.append(w)
    return from_surfaces(words, source_id)


def slice_words(seq: TokenSequence, start: int, end: int) -> TokenSequence:
    """Words ``start`` (inclusive) to ``end`` (exclusive), recoded from 0."""
    n = len(seq)
    if not 0 <= start <= n:
        raise RangeError(f"start={start} outside [0, {n}]")
    if not start <= end <= n:
        raise RangeError(f"end={end} outside [{start}, {n}]")
    vocab = seq.vocab
    return from_surfaces((vocab[t] for t in seq.tokens[start:end]), seq.source_id)


def read_text(path: str | Path) -> str:
    return Path(path).read_text(encoding="utf-8")


@dataclass(frozen=True)
class ManifestEntry:
    doc_id: str
    path: Path
    label: str

    @property
    def labels(self) -> tuple[str, ...]:
        """All genre labels of the document (``|``-separated in the CSV)."""
        return tuple(s.strip() for s in self.label.split(LABEL_SEP) if s.strip())


@dataclass(frozen=True)
class CorpusManifest:
    entries: tuple[ManifestEntry, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read a ``doc_id,path,label`` CSV.

    Relative document paths are resolved against the manifest's directory.
    Line numbers in errors count the header as line 1.
    """
    path = Path(path)
    try:
        fh = path.open(newline="", encoding="utf-8")
    except FileNotFoundError:
        raise ParseError(f"manifest not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != MANIFEST_HEADER:
            raise ParseError(f"expected header {','.join(MANIFEST_HEADER)}, got {header!r}", line=1)
        entries: list[ManifestEntry] = []
        seen: dict[str, int] = {}
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(MANIFEST_HEADER):
                raise ParseError(f"row has {len(row)} columns, expected 3", line=line)
            doc_id, doc_path, label = (c.strip() for c in row)
            if doc_id in seen:
                raise ParseError(
                    f"duplicate doc_id {doc_id!r} (first seen on line {seen[doc_id]})", line=line
                )
            seen[doc_id] = line
            p = Path(doc_path)
            if not p.is_absolute():
                p = path.parent / p
            entries.append(ManifestEntry(doc_id, p, label))
    return CorpusManifest(tuple(entries))


def surfaces_equal(a: TokenSequence, b: TokenSequence | Sequence[str]) -> bool:
    other = b.surfaces() if isinstance(b, TokenSequence) else list(b)
    return a.surfaces() == other
