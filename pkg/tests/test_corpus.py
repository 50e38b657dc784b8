import pytest

from netstylo.corpus import (LemmaRules, LexiconTagger, RawDocument, StopwordList,
                             TokenStream, ingest_pretagged, load_manifest,
                             load_stopwords, preprocess_document,
                             remove_stopwords, tag_and_lemmatize, tokenize)
from netstylo.errors import MissingLemmaResource, ParseError


def test_tokenize_strips_punctuation():
    assert tokenize("The cat, the cat!") == ["the", "cat", "the", "cat"]


def test_tokenize_empty():
    assert tokenize("") == []


def test_tokenize_keeps_apostrophes_drops_digits():
    assert tokenize("It's 2 cats") == ["it's", "cats"]


def test_tokenize_digits_split_words():
    assert tokenize("abc123def") == ["abc", "def"]


def _lemma_of(word: str, tag: str) -> str:
    return LemmaRules.bundled().lemma(word, tag)


def test_lemmatize_plural_noun():
    assert _lemma_of("cats", "NOUN") == "cat"


def test_lemmatize_verb_ing():
    assert _lemma_of("running", "VERB") == "run"


def test_lemmatize_identity_for_base_form():
    assert _lemma_of("whale", "NOUN") == "whale"


@pytest.mark.parametrize("word,tag,lemma", [
    ("was", "VERB", "be"),
    ("went", "VERB", "go"),
    ("children", "NOUN", "child"),
    ("making", "VERB", "make"),
    ("carried", "VERB", "carry"),
    ("tries", "VERB", "try"),
    ("boxes", "NOUN", "box"),
    ("houses", "NOUN", "house"),
    ("buses", "NOUN", "bus"),
    ("cities", "NOUN", "city"),
    ("glass", "NOUN", "glass"),
    ("stopped", "VERB", "stop"),
    ("loved", "VERB", "love"),
    ("walked", "VERB", "walk"),
])
def test_lemmatize_cases(word, tag, lemma):
    assert _lemma_of(word, tag) == lemma


def test_unknown_words_pass_through():
    assert _lemma_of("zorblat", "NOUN") == "zorblat"
    assert _lemma_of("zorblat", "OTHER") == "zorblat"


def test_tagger_known_and_suffix():
    tagger = LexiconTagger.bundled()
    assert tagger.tag(["cat", "run", "quickly", "happiness"]) == \
        ["NOUN", "VERB", "ADV", "NOUN"]
    assert tagger.tag_word("cats") == "NOUN"
    assert tagger.tag_word("runs") == "VERB"


def test_tag_and_lemmatize_positions():
    tokens = tag_and_lemmatize(["the", "cats", "ran"])
    assert [t.position for t in tokens] == [0, 1, 2]
    assert tokens[1].lemma == "cat"
    assert tokens[2].lemma == "run"


def _stream(lemmas: list[str]) -> TokenStream:
    tokens = tag_and_lemmatize(lemmas)
    return TokenStream(author_id="a", doc_id="d", tokens=tokens)


def test_remove_stopwords_basic():
    stream = _stream(["the", "cat", "the", "cat"])
    out = remove_stopwords(stream, StopwordList(frozenset({"the"})))
    assert out.lemmas() == ["cat", "cat"]


def test_remove_stopwords_empty():
    out = remove_stopwords(_stream([]), load_stopwords())
    assert out.lemmas() == []


def test_remove_stopwords_idempotent_and_order_preserving():
    text = "The whale ran across the dark sea, and the captain saw it."
    doc = RawDocument(author_id="a", doc_id="d", text=text)
    stream = preprocess_document(doc)
    again = remove_stopwords(stream, load_stopwords())
    assert again == stream
    positions = [t.position for t in stream.tokens]
    assert positions == sorted(positions)
    assert len(set(positions)) == len(positions)


def test_preprocess_filters_on_lemmas():
    # "was" lemmatizes to "be", which is a stopword
    doc = RawDocument(author_id="a", doc_id="d", text="the whale was enormous")
    stream = preprocess_document(doc)
    assert "be" not in stream.lemmas()
    assert "whale" in stream.lemmas()


def test_stream_serialization_deterministic():
    doc = RawDocument(author_id="a", doc_id="d", text="Cats ran; cats slept.")
    one = preprocess_document(doc).to_tsv()
    two = preprocess_document(doc).to_tsv()
    assert one == two
    assert "cats\tcat\tNOUN" in one


def test_ingest_pretagged_roundtrip(tmp_path):
    doc = RawDocument(author_id="a", doc_id="d",
                      text="The captain saw three white whales near the shore.")
    stream = preprocess_document(doc)
    path = tmp_path / "doc.tsv"
    stream.write_tsv(path)
    back = ingest_pretagged(path, author_id="a", doc_id="d",
                            stopwords=load_stopwords())
    assert back.lemmas() == stream.lemmas()
    assert [t.pos for t in back.tokens] == [t.pos for t in stream.tokens]


def test_ingest_pretagged_single_line(tmp_path):
    path = tmp_path / "one.tsv"
    path.write_text("cats\tcat\tNOUN\n", encoding="utf-8")
    stream = ingest_pretagged(path)
    assert len(stream) == 1
    assert stream.tokens[0].surface == "cats"
    assert stream.tokens[0].lemma == "cat"


def test_ingest_pretagged_empty_file(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("", encoding="utf-8")
    assert ingest_pretagged(path).lemmas() == []


def test_ingest_pretagged_malformed_line(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("cats\tcat\tNOUN\nnotabbedline\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        ingest_pretagged(path)
    assert err.value.line == 2


def test_missing_lemma_resource(tmp_path):
    with pytest.raises(MissingLemmaResource):
        LemmaRules.from_file(tmp_path / "nope.tsv")


def test_load_stopwords_from_file(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("Alpha\nbeta\n\nbeta\n", encoding="utf-8")
    sw = load_stopwords(path)
    assert sw.words == frozenset({"alpha", "beta"})
    assert "alpha" in sw


def test_load_manifest(tmp_path):
    (tmp_path / "t1.txt").write_text("hello", encoding="utf-8")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("author,doc,path\nau1,d1,t1.txt\n", encoding="utf-8")
    rows = load_manifest(manifest)
    assert rows == [("au1", "d1", tmp_path / "t1.txt")]


def test_load_manifest_bad_header(tmp_path):
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ParseError):
        load_manifest(manifest)


def test_load_manifest_duplicate_book(tmp_path):
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("author,doc,path\na,d,x.txt\na,d,y.txt\n",
                        encoding="utf-8")
    with pytest.raises(ParseError):
        load_manifest(manifest)
