"""Corpus ingestion and preprocessing.

Raw texts are tokenized, coarse-POS-tagged, lemmatized (nouns to singular,
verbs to infinitive) and stripped of stopwords.  The surviving lemma sequence
is the unit everything downstream works on.
"""

import csv
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Protocol

from .errors import MissingLemmaResource, ParseError

COARSE_TAGS = ("NOUN", "VERB", "ADJ", "ADV", "OTHER")

# Maximal alphabetic runs, keeping internal apostrophes ("don't" stays whole).
# Digits and punctuation act as separators.
_WORD_RE = re.compile(r"[^\W\d_]+(?:'[^\W\d_]+)*", re.UNICODE)


@dataclass(frozen=True)
class RawDocument:
    author_id: str
    doc_id: str
    text: str
    source_path: str | None = None


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    pos: str
    position: int  # 0-based index in the pre-filter token sequence


@dataclass
class TokenStream:
    author_id: str
    doc_id: str
    tokens: list[Token]

    def __len__(self) -> int:
        return len(self.tokens)

    def lemmas(self) -> list[str]:
        return [t.lemma for t in self.tokens]

    def to_tsv(self) -> str:
        """Serialize as one `surface<TAB>lemma<TAB>tag` line per token."""
        return "".join(f"{t.surface}\t{t.lemma}\t{t.pos}\n" for t in self.tokens)

    def write_tsv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_tsv(), encoding="utf-8")


@dataclass(frozen=True)
class StopwordList:
    words: frozenset[str]
    source_path: str | None = None

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


class TaggerInterface(Protocol):
    """Anything that maps a token sequence to coarse tags, one per token."""

    def tag(self, surfaces: list[str]) -> list[str]: ...


def _data_text(name: str) -> str:
    return resources.files("netstylo.data").joinpath(name).read_text(encoding="utf-8")


def load_stopwords(path: str | Path | None = None) -> StopwordList:
    """Load a stopword file (one lowercase word per line); bundled list if no path."""
    if path is None:
        raw = _data_text("stopwords_en.txt")
        src = None
    else:
        raw = Path(path).read_text(encoding="utf-8")
        src = str(path)
    words = frozenset(w.strip().lower() for w in raw.splitlines() if w.strip())
    return StopwordList(words=words, source_path=src)


class LexiconTagger:
    """Coarse POS tagging by lexicon lookup with suffix fallbacks.

    Intentionally simple: tagging quality only has to be good enough to pick
    the right lemmatization rule.  Heavier taggers can be plugged in through
    TaggerInterface, or their output ingested via `ingest_pretagged`.
    """

    _NOUN_SUFFIXES = ("tion", "sion", "ment", "ness", "ity", "ship", "hood",
                      "ism", "ance", "ence", "ture", "age")
    _ADJ_SUFFIXES = ("ous", "ful", "less", "able", "ible", "ive", "ish",
                     "ant", "ent", "ic", "al")

    def __init__(self, lexicon: dict[str, str]):
        self.lexicon = lexicon

    @classmethod
    def bundled(cls) -> "LexiconTagger":
        return cls(_parse_lexicon(_data_text("tag_lexicon.tsv"), "tag_lexicon.tsv"))

    @classmethod
    def from_file(cls, path: str | Path) -> "LexiconTagger":
        p = Path(path)
        if not p.exists():
            raise MissingLemmaResource(f"tag lexicon not found: {p}")
        return cls(_parse_lexicon(p.read_text(encoding="utf-8"), str(p)))

    def tag_word(self, w: str) -> str:
        t = self.lexicon.get(w)
        if t is not None:
            return t
        # inflected forms of known words
        if w.endswith("ies") and w[:-3] + "y" in self.lexicon:
            return self.lexicon[w[:-3] + "y"]
        if w.endswith("es") and w[:-2] in self.lexicon:
            return self.lexicon[w[:-2]]
        if w.endswith("s") and w[:-1] in self.lexicon:
            return self.lexicon[w[:-1]]
        if w.endswith("ly"):
            return "ADV"
        if w.endswith(("ing", "ed")):
            return "VERB"
        if w.endswith(self._NOUN_SUFFIXES):
            return "NOUN"
        if w.endswith(self._ADJ_SUFFIXES):
            return "ADJ"
        return "NOUN"

    def tag(self, surfaces: list[str]) -> list[str]:
        return [self.tag_word(w) for w in surfaces]


def _parse_lexicon(raw: str, source: str) -> dict[str, str]:
    lex: dict[str, str] = {}
    for i, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or parts[1] not in COARSE_TAGS:
            raise ParseError(f"bad lexicon entry in {source}: {line!r}", line=i)
        lex[parts[0].lower()] = parts[1]
    return lex


class LemmaRules:
    """Lemma dictionary plus suffix rules for plural/conjugation stripping.

    `exceptions` maps (surface, tag) to a lemma; tag "*" matches any tag.
    `known` is the vocabulary used to validate suffix-rule candidates (e.g.
    restoring the silent e in "making" -> "make").
    """

    # consonants eligible for un-doubling ("stopped" -> "stop"); 's' excluded
    # so "-ss" verbs (pass, miss) are not mangled when unknown
    _DOUBLED = "bdgklmnprt"

    def __init__(self, exceptions: dict[tuple[str, str], str], known: set[str]):
        self.exceptions = exceptions
        self.known = known
        # surfaces with one lemma across all tags rescue mistagged irregulars
        # ("ran" tagged NOUN still maps to "run")
        by_surface: dict[str, set[str]] = {}
        for (surface, _), lemma in exceptions.items():
            by_surface.setdefault(surface, set()).add(lemma)
        self._unique = {s: next(iter(lemmas)) for s, lemmas in by_surface.items()
                        if len(lemmas) == 1}

    @classmethod
    def bundled(cls) -> "LemmaRules":
        exceptions = _parse_exceptions(
            _data_text("lemma_exceptions.tsv"), "lemma_exceptions.tsv")
        lexicon = _parse_lexicon(_data_text("tag_lexicon.tsv"), "tag_lexicon.tsv")
        known = set(lexicon) | set(exceptions.values())
        return cls(exceptions, known)

    @classmethod
    def from_file(cls, path: str | Path) -> "LemmaRules":
        p = Path(path)
        if not p.exists():
            raise MissingLemmaResource(f"lemma dictionary not found: {p}")
        exceptions = _parse_exceptions(p.read_text(encoding="utf-8"), str(p))
        base = cls.bundled()
        merged = dict(base.exceptions)
        merged.update(exceptions)
        return cls(merged, base.known | set(exceptions.values()))

    def lemma(self, surface: str, tag: str) -> str:
        w = surface.lower()
        exc = (self.exceptions.get((w, tag)) or self.exceptions.get((w, "*"))
               or self._unique.get(w))
        if exc is not None:
            return exc
        if tag == "NOUN":
            return self._singular(w)
        if tag == "VERB":
            return self._infinitive(w)
        return w

    def _pick(self, candidates: list[str]) -> str:
        for c in candidates:
            if c in self.known:
                return c
        return candidates[0]

    def _singular(self, w: str) -> str:
        if len(w) <= 3 or not w.endswith("s") or w.endswith(("ss", "us", "is")):
            return w
        if w.endswith("ies") and len(w) > 4:
            return self._pick([w[:-3] + "y", w[:-1]])
        if w.endswith(("ches", "shes", "sses", "xes", "zes")):
            return self._pick([w[:-2], w[:-1]])
        if w.endswith("es"):
            return self._pick([w[:-1], w[:-2]])
        return w[:-1]

    def _infinitive(self, w: str) -> str:
        if w.endswith("ies") and len(w) > 4:
            return self._pick([w[:-3] + "y", w[:-1]])
        if w.endswith("es") and len(w) > 3 and not w.endswith("ss"):
            return self._pick([w[:-1], w[:-2]])
        if w.endswith("s") and len(w) > 3 and not w.endswith("ss"):
            return w[:-1]
        if w.endswith("ied") and len(w) > 4:
            return w[:-3] + "y"
        if w.endswith("ed") and len(w) > 3:
            return self._restore(w[:-2])
        if w.endswith("ing") and len(w) > 4:
            return self._restore(w[:-3])
        return w

    def _restore(self, stem: str) -> str:
        if stem in self.known:
            return stem
        if stem + "e" in self.known:
            return stem + "e"
        if (len(stem) >= 3 and stem[-1] == stem[-2]
                and stem[-1] in self._DOUBLED):
            return stem[:-1]
        return stem


def _parse_exceptions(raw: str, source: str) -> dict[tuple[str, str], str]:
    exc: dict[tuple[str, str], str] = {}
    for i, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not all(parts):
            raise ParseError(f"bad lemma entry in {source}: {line!r}", line=i)
        surface, tag, lemma = parts
        if tag != "*" and tag not in COARSE_TAGS:
            raise ParseError(f"unknown tag in {source}: {line!r}", line=i)
        exc[(surface.lower(), tag)] = lemma.lower()
    return exc


def tokenize(text: str) -> list[str]:
    """Split text into lowercased alphabetic tokens.

    Punctuation and digits separate tokens; internal apostrophes are kept
    ("don't" is one token).  Empty text yields an empty list.
    """
    return _WORD_RE.findall(text.lower())


def tag_and_lemmatize(surfaces: list[str],
                      tagger: TaggerInterface | None = None,
                      rules: LemmaRules | None = None) -> list[Token]:
    """Tag each surface token and map it to its lemma.

    Unknown words pass through unchanged apart from the suffix rules.
    Positions index the pre-filter sequence, so they survive stopword removal.
    """
    if tagger is None:
        tagger = LexiconTagger.bundled()
    if rules is None:
        rules = LemmaRules.bundled()
    tags = tagger.tag(surfaces)
    if len(tags) != len(surfaces):
        raise ValueError("tagger returned wrong number of tags")
    return [Token(surface=w, lemma=rules.lemma(w, t), pos=t, position=i)
            for i, (w, t) in enumerate(zip(surfaces, tags))]


def remove_stopwords(stream: TokenStream, stopwords: StopwordList) -> TokenStream:
    """Drop tokens whose lemma is a stopword; order and positions are kept."""
    kept = [t for t in stream.tokens if t.lemma not in stopwords]
    return TokenStream(author_id=stream.author_id, doc_id=stream.doc_id, tokens=kept)


def preprocess_document(doc: RawDocument,
                        tagger: TaggerInterface | None = None,
                        rules: LemmaRules | None = None,
                        stopwords: StopwordList | None = None) -> TokenStream:
    """Full preprocessing: tokenize, tag, lemmatize, then filter stopwords."""
    if stopwords is None:
        stopwords = load_stopwords()
    tokens = tag_and_lemmatize(tokenize(doc.text), tagger, rules)
    stream = TokenStream(author_id=doc.author_id, doc_id=doc.doc_id, tokens=tokens)
    return remove_stopwords(stream, stopwords)


def ingest_pretagged(path: str | Path,
                     author_id: str = "",
                     doc_id: str = "",
                     stopwords: StopwordList | None = None) -> TokenStream:
    """Read an externally tagged document (`surface<TAB>lemma<TAB>tag` lines).

    This is the escape hatch for users who run their own tagger.  Passing the
    active stopword list makes the result identical to `preprocess_document`
    applied to the same tags; with `stopwords=None` no filtering happens.
    """
    tokens: list[Token] = []
    raw = Path(path).read_text(encoding="utf-8")
    position = 0
    for i, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not parts[0] or not parts[1]:
            raise ParseError(f"expected surface<TAB>lemma<TAB>tag, got {line!r}", line=i)
        surface, lemma, tag = parts
        if tag not in COARSE_TAGS:
            raise ParseError(f"unknown tag {tag!r}", line=i)
        tokens.append(Token(surface=surface, lemma=lemma.lower(), pos=tag,
                            position=position))
        position += 1
    stream = TokenStream(author_id=author_id, doc_id=doc_id, tokens=tokens)
    if stopwords is not None:
        stream = remove_stopwords(stream, stopwords)
    return stream


def load_manifest(path: str | Path) -> list[tuple[str, str, Path]]:
    """Parse a corpus manifest CSV (`author,doc,path`) into (author, doc, path) rows.

    Relative paths are resolved against the manifest's directory.
    """
    p = Path(path)
    rows: list[tuple[str, str, Path]] = []
    seen: set[tuple[str, str]] = set()
    with p.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["author", "doc", "path"]:
            raise ParseError(f"manifest header must be author,doc,path, got {header}", line=1)
        for i, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3 or not all(f.strip() for f in row):
                raise ParseError(f"bad manifest row {row!r}", line=i)
            author, doc, text_path = (f.strip() for f in row)
            if (author, doc) in seen:
                raise ParseError(f"duplicate (author, doc) pair {(author, doc)}", line=i)
            seen.add((author, doc))
            resolved = Path(text_path)
            if not resolved.is_absolute():
                resolved = p.parent / resolved
            rows.append((author, doc, resolved))
    return rows


def read_documents(manifest_path: str | Path) -> Iterable[RawDocument]:
    """Yield RawDocuments for a manifest; unreadable or empty files raise OSError/ValueError."""
    for author, doc, text_path in load_manifest(manifest_path):
        text = Path(text_path).read_text(encoding="utf-8")
        if not text.strip():
            raise ValueError(f"empty text for ({author}, {doc}): {text_path}")
        yield RawDocument(author_id=author, doc_id=doc, text=text,
                          source_path=str(text_path))
