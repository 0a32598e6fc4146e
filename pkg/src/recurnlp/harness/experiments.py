"""Desk-scale experiments: DET against compressibility, and genre signatures."""

from __future__ import annotations

import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..corpus import CorpusManifest, ManifestEntry, from_surfaces, read_text, slice_words, tokenize
from ..errors import InsufficientDataError, UndefinedInputError
from ..recurrence import RqaMeasures, build_rp, rqa_measures
from . import prng
from .cluster import Dendrogram, hclust_dendrogram
from .stats import ols_r2, pearson_r, standardize_columns

log = logging.getLogger(__name__)

SUBSTRINGS = ("a", "b", "c", "a b", "b c", "a b c")
DEFLATE_LEVEL = 9
COMPRESSOR = f"raw DEFLATE (zlib, wbits=-15, level {DEFLATE_LEVEL})"

MEASURES = ("rr", "det", "maxline", "meanline", "ent")


# -- compression ---------------------------------------------------------------

def deflate_size(data: bytes, level: int = DEFLATE_LEVEL) -> int:
    c = zlib.compressobj(level, zlib.DEFLATED, -15)
    return len(c.compress(data) + c.flush())


def compressibility_ratio(text: str) -> float:
    """``1 - deflated / raw`` size of the UTF-8 encoding of ``text``."""
    raw = text.encode("utf-8")
    if not raw:
        raise UndefinedInputError("cannot compress an empty string")
    return 1.0 - deflate_size(raw) / len(raw)


def random_substring_text(rng: prng.Xoshiro256StarStar, samples: int) -> list[str]:
    """Tokens of ``samples`` uniform draws from :data:`SUBSTRINGS`."""
    tokens: list[str] = []
    for _ in range(samples):
        tokens.extend(SUBSTRINGS[rng.randbelow(len(SUBSTRINGS))].split())
    return tokens


@dataclass(frozen=True)
class CompressionReport:
    runs: tuple[tuple[float, float], ...]
    pearson_r: float
    seed: int
    samples_per_string: int
    prng: str = prng.NAME
    compressor: str = COMPRESSOR

    def as_dict(self, include_runs: bool = False) -> dict:
        d = {
            "n_runs": len(self.runs),
            "samples_per_string": self.samples_per_string,
            "seed": self.seed,
            "prng": self.prng,
            "compressor": self.compressor,
            "pearson_r": self.pearson_r,
            "det_mean": float(np.mean([r[0] for r in self.runs])),
            "ratio_mean": float(np.mean([r[1] for r in self.runs])),
        }
        if include_runs:
            d["runs"] = [{"det": a, "ratio": b} for a, b in self.runs]
        return d


def compression_experiment(n_runs: int = 1000, samples_per_string: int = 100, seed: int = 1) -> CompressionReport:
    """Correlate DET with DEFLATE compressibility over random substring texts.

    Each run concatenates ``samples_per_string`` draws from
    ``'a', 'b', 'c', 'a b', 'b c', 'a b c'``; DET comes from the
    recurrence plot at theiler 1 and the ratio from the space-joined
    token string. All runs share one generator stream seeded by ``seed``.
    """
    if n_runs < 2:
        raise InsufficientDataError("need at least 2 runs to correlate")
    rng = prng.Xoshiro256StarStar(seed)
    runs = []
    for _ in range(n_runs):
        tokens = random_substring_text(rng, samples_per_string)
        det = rqa_measures(build_rp(from_surfaces(tokens), theiler=1)).det
        runs.append((det, compressibility_ratio(" ".join(tokens))))
    r = pearson_r([a for a, _ in runs], [b for _, b in runs])
    return CompressionReport(tuple(runs), r, seed, samples_per_string)


# -- genre -----------------------------------------------------------------------

@dataclass(frozen=True)
class DocumentResult:
    doc_id: str
    labels: tuple[str, ...]
    n_words: int
    measures: RqaMeasures

    def display(self) -> dict[str, float]:
        return display_units(self.measures)


@dataclass(frozen=True)
class SkippedDocument:
    doc_id: str
    path: str
    reason: str


@dataclass(frozen=True)
class GenreRow:
    label: str
    n_docs: int
    means: dict[str, float]


@dataclass(frozen=True)
class GenreReport:
    rows: tuple[GenreRow, ...]
    r2: dict[str, float | None]
    dendrogram: Dendrogram
    documents: tuple[DocumentResult, ...] = ()
    skipped: tuple[SkippedDocument, ...] = ()
    settings: dict = field(default_factory=dict)

    def row(self, label: str) -> GenreRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def as_dict(self) -> dict:
        return {
            "settings": self.settings,
            "genres": [{"label": r.label, "n_docs": r.n_docs, **r.means} for r in self.rows],
            "r2": self.r2,
            "dendrogram": self.dendrogram.as_dict(),
            "n_documents": len(self.documents),
            "skipped": [vars(s) for s in self.skipped],
        }


def display_units(m: RqaMeasures) -> dict[str, float]:
    """RR and DET in percent, the rest unchanged."""
    return {
        "rr": 100.0 * m.rr,
        "det": 100.0 * m.det,
        "maxline": float(m.maxline),
        "meanline": m.meanline,
        "ent": m.ent,
    }


def analyze_document(
    entry: ManifestEntry,
    start: int = 5000,
    end: int = 10000,
    min_words: int = 10000,
    theiler: int = 1,
) -> DocumentResult | SkippedDocument:
    """Measures of words ``[start, end)`` of one document, or why it was skipped."""
    try:
        seq = tokenize(read_text(entry.path), source_id=entry.doc_id)
    except (OSError, UnicodeDecodeError) as e:
        return SkippedDocument(entry.doc_id, str(entry.path), f"unreadable: {e}")
    n = len(seq)
    if n < min_words:
        return SkippedDocument(entry.doc_id, str(entry.path), f"{n} words < min_words={min_words}")
    if start >= n:
        return SkippedDocument(entry.doc_id, str(entry.path), f"{n} words, slice starts at {start}")
    part = slice_words(seq, start, min(end, n))
    m = rqa_measures(build_rp(part, theiler))
    if m.n_lines == 0:
        return SkippedDocument(entry.doc_id, str(entry.path), "no diagonal line; measures undefined")
    return DocumentResult(entry.doc_id, entry.labels, len(part), m)


def _analyze(args):
    return analyze_document(*args)


def genre_experiment(
    manifest: CorpusManifest,
    slice: tuple[int, int] = (5000, 10000),
    min_words: int = 10000,
    theiler: int = 1,
    jobs: int = 1,
) -> GenreReport:
    """Per-genre means, genre R^2 per measure and a dendrogram of genres.

    A document carrying several labels counts once for each of them, both
    in the means and in the regressions. Skipped documents are logged and
    listed in the report.
    """
    start, end = slice
    tasks = [(e, start, end, min_words, theiler) for e in manifest]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_analyze, tasks, chunksize=4))
    else:
        results = [_analyze(t) for t in tasks]

    docs = [r for r in results if isinstance(r, DocumentResult)]
    skipped = [r for r in results if isinstance(r, SkippedDocument)]
    for s in skipped:
        log.warning("skipped %s (%s): %s", s.doc_id, s.path, s.reason)

    obs_labels: list[str] = []
    obs_values: list[dict[str, float]] = []
    for d in docs:
        vals = d.display()
        for lab in d.labels:
            obs_labels.append(lab)
            obs_values.append(vals)

    genres = sorted(set(obs_labels))
    if len(genres) < 2:
        raise InsufficientDataError(f"need at least 2 genres with documents, have {len(genres)}")

    rows = []
    for g in genres:
        members = [v for lab, v in zip(obs_labels, obs_values) if lab == g]
        means = {k: float(np.mean([v[k] for v in members])) for k in MEASURES}
        rows.append(GenreRow(g, len(members), means))

    r2: dict[str, float | None] = {}
    for k in MEASURES:
        try:
            r2[k] = ols_r2([v[k] for v in obs_values], obs_labels)
        except (UndefinedInputError, InsufficientDataError):
            r2[k] = None

    matrix = standardize_columns(np.array([[r.means[k] for k in MEASURES] for r in rows]))
    tree = hclust_dendrogram(matrix, genres)
    settings = {
        "slice": [start, end],
        "min_words": min_words,
        "theiler": theiler,
        "linkage": "complete",
        "distance": "euclidean on column z-scores",
        "units": {"rr": "percent", "det": "percent", "ent": "nats"},
    }
    return GenreReport(tuple(rows), r2, tree, tuple(docs), tuple(skipped), settings)

