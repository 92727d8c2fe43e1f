"""Link extracted drug mentions to SNOMED-CT and BNF codes.

The mapping table comes from a codes spreadsheet (SNOMED <-> BNF <-> dm+d)
that is cleaned on load: rows are normalized, deduplicated on
(description, snomed code), and rows describing non-drug appliances are
dropped via a stop-word list. Lookup is a fuzzy search: normalized
Levenshtein similarity against each entry's description words and the
full description, best score wins. BNF linking never needs a match, it is
a keyword search URL built from the query itself.
"""

from __future__ import annotations

import csv
import re
import urllib.parse
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from medner.core import SCHEME
from medner.errors import EmptyQuery, LengthMismatch, MalformedRow

DEFAULT_STOP_WORDS = frozenset({"system", "ostomy", "bag", "filter", "piece", "closure"})

# Deployment configuration, not ground truth: KB sites move.
DEFAULT_SNOMED_URL_TEMPLATE = (
    "https://termbrowser.nhs.uk/?perspective=full&conceptId1={code}"
)
DEFAULT_BNF_URL_TEMPLATE = "https://bnf.nice.org.uk/search/?q={query}"

_WS = re.compile(r"\s+")


def normalize(text: str) -> str:
    """Lowercase and collapse runs of whitespace."""
    return _WS.sub(" ", text.strip().lower())


def levenshtein(a: str, b: str) -> int:
    """Classic edit distance, two-row DP."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[len(b)]


def similarity(a: str, b: str) -> float:
    """1 - lev/max(len); 1.0 iff the normalized strings are equal."""
    a, b = normalize(a), normalize(b)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


@dataclass(frozen=True)
class MappingEntry:
    snomed_code: str
    bnf_code: str
    description: str
    dmd_code: Optional[str] = None


@dataclass(frozen=True)
class CleanStats:
    input_rows: int
    malformed: int
    duplicates: int
    stopword_discarded: int
    kept: int


@dataclass
class MappingTable:
    entries: list[MappingEntry]
    stop_words: frozenset[str] = DEFAULT_STOP_WORDS
    stats: Optional[CleanStats] = None
    # description -> (normalized form, its words), precomputed for lookup
    _norm: list[tuple[str, tuple[str, ...]]] = field(init=False, repr=False)

    def __post_init__(self):
        self._norm = []
        for e in self.entries:
            norm = normalize(e.description)
            self._norm.append((norm, tuple(norm.split(" "))))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class LinkResult:
    query: str
    entry: Optional[MappingEntry]
    score: Optional[float]
    snomed_url: Optional[str]
    bnf_url: str
    word_start: Optional[int] = None
    word_end: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "query": self.query,
            "matched": None
            if self.entry is None
            else {
                "snomed_code": self.entry.snomed_code,
                "bnf_code": self.entry.bnf_code,
                "dmd_code": self.entry.dmd_code,
                "description": self.entry.description,
                "score": self.score,
            },
            "snomed_url": self.snomed_url,
            "bnf_url": self.bnf_url,
            "word_start": self.word_start,
            "word_end": self.word_end,
        }


def _contains_stop_word(norm_description: str, stop_words: Iterable[str]) -> bool:
    words = set(norm_description.split(" "))
    return any(sw in words for sw in stop_words)


def load_and_clean(
    raw_rows: Iterable[dict],
    stop_words: Iterable[str] = DEFAULT_STOP_WORDS,
) -> MappingTable:
    """Build a MappingTable from raw record dicts.

    Rows missing snomed_code or description are skipped (counted, not
    fatal). Duplicates on (normalized description, snomed_code) keep the
    first occurrence. Rows whose normalized description contains a stop
    word as a whole word are discarded. Cleaning is idempotent: running
    the output back through changes nothing.
    """
    stop_words = frozenset(normalize(w) for w in stop_words)
    entries: list[MappingEntry] = []
    seen: set[tuple[str, str]] = set()
    n_input = n_malformed = n_dupes = n_stopped = 0
    for row in raw_rows:
        n_input += 1
        snomed = str(row.get("snomed_code") or "").strip()
        description = str(row.get("description") or "").strip()
        if not snomed or not description:
            n_malformed += 1
            continue
        norm = normalize(description)
        key = (norm, snomed)
        if key in seen:
            n_dupes += 1
            continue
        seen.add(key)
        if _contains_stop_word(norm, stop_words):
            n_stopped += 1
            continue
        entries.append(
            MappingEntry(
                snomed_code=snomed,
                bnf_code=str(row.get("bnf_code") or "").strip(),
                description=description,
                dmd_code=(str(row["dmd_code"]).strip() or None)
                if row.get("dmd_code")
                else None,
            )
        )
    stats = CleanStats(
        input_rows=n_input,
        malformed=n_malformed,
        duplicates=n_dupes,
        stopword_discarded=n_stopped,
        kept=len(entries),
    )
    return MappingTable(entries=entries, stop_words=stop_words, stats=stats)


def load_mapping_csv(
    path: str, stop_words: Iterable[str] = DEFAULT_STOP_WORDS
) -> MappingTable:
    """Read a UTF-8 CSV with a header naming snomed_code, bnf_code,
    description (dmd_code optional); column order is free."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise MalformedRow(f"{path}: missing header row")
        missing = {"snomed_code", "description"} - set(reader.fieldnames)
        if missing:
            raise MalformedRow(f"{path}: header lacks columns {sorted(missing)}")
        return load_and_clean(list(reader), stop_words)


def entry_rows(table: MappingTable) -> list[dict]:
    """Entries as raw record dicts, the inverse of load_and_clean."""
    return [
        {
            "snomed_code": e.snomed_code,
            "bnf_code": e.bnf_code,
            "description": e.description,
            "dmd_code": e.dmd_code,
        }
        for e in table.entries
    ]


def bnf_url(query: str, template: str = DEFAULT_BNF_URL_TEMPLATE) -> str:
    return template.format(query=urllib.parse.quote(query))


def snomed_url(code: str, template: str = DEFAULT_SNOMED_URL_TEMPLATE) -> str:
    return template.format(code=urllib.parse.quote(code))


def fuzzy_link(
    query: str,
    table: MappingTable,
    threshold: float = 0.8,
    snomed_template: str = DEFAULT_SNOMED_URL_TEMPLATE,
    bnf_template: str = DEFAULT_BNF_URL_TEMPLATE,
) -> LinkResult:
    """Best fuzzy match for a query against the cleaned table.

    Entry score = max similarity of the query against the entry's
    description words and the whole description. The first entry in table
    order wins ties. The BNF URL is produced from the query regardless of
    whether anything matched.
    """
    if not query or not query.strip():
        raise EmptyQuery("query must be non-empty")
    q = normalize(query)
    best: Optional[MappingEntry] = None
    best_score = -1.0
    for entry, (norm, words) in zip(table.entries, table._norm):
        score = similarity(q, norm)
        for w in words:
            if score >= 1.0:
                break
            s = similarity(q, w)
            if s > score:
                score = s
        if score > best_score:
            best, best_score = entry, score
    matched = best is not None and best_score >= threshold
    return LinkResult(
        query=query,
        entry=best if matched else None,
        score=best_score if matched else None,
        snomed_url=snomed_url(best.snomed_code, snomed_template) if matched else None,
        bnf_url=bnf_url(query, bnf_template),
    )


def link_document(
    words: Sequence[str],
    labels: Sequence[int],
    table: MappingTable,
    threshold: float = 0.8,
    classes: Iterable[str] = ("Drug",),
    snomed_template: str = DEFAULT_SNOMED_URL_TEMPLATE,
    bnf_template: str = DEFAULT_BNF_URL_TEMPLATE,
) -> list[LinkResult]:
    """One fuzzy link per maximal run of words labeled with a linkable
    class (Drug by default). Consecutive B-X/I-X words of the same class
    join with single spaces into one query."""
    if len(words) != len(labels):
        raise LengthMismatch(f"{len(words)} words vs {len(labels)} labels")
    wanted = set(classes)
    results: list[LinkResult] = []
    i = 0
    n = len(words)
    while i < n:
        cls = SCHEME.entity_class_of(labels[i])
        if cls is None or cls not in wanted:
            i += 1
            continue
        j = i + 1
        while j < n and SCHEME.entity_class_of(labels[j]) == cls:
            j += 1
        query = " ".join(words[i:j])
        res = fuzzy_link(query, table, threshold, snomed_template, bnf_template)
        results.append(
            LinkResult(
                query=res.query,
                entry=res.entry,
                score=res.score,
                snomed_url=res.snomed_url,
                bnf_url=res.bnf_url,
                word_start=i,
                word_end=j,
            )
        )
        i = j
    return results
