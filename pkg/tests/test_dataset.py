import random
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tp53nn.dataset import (
    CATEGORICAL, COLUMNS, Record, decode_label, dump_records, encode, encode_all, encode_inputs,
    fit_encoder, load_records, read_records, split,
)
from tp53nn.errors import BadInteger, EmptyDataset, EmptyFile, MissingColumn, SingleClass, UnknownCategory, UnknownLabel

HEADER = ",".join(COLUMNS) + "\n"


def make_record(pos=94, gene_location="Lung", cancer="A", **kw):
    base = dict(mutation_position=pos, wt_codon="AT", wt_codon_2="GAG", mutant="CAG", wt_aa="Glu",
                mutant_aa="Gln", event="G>C", mutant_flag="B", type_1="SN", type_2="Tv",
                gene_location=gene_location, cancer=cancer)
    base.update(kw)
    return Record(**base)


@pytest.fixture(scope="module")
def sample_rows(sample_csv):
    return read_records(sample_csv)


# --- loading ----------------------------------------------------------------

def test_bundled_sample(sample_rows):
    assert len(sample_rows) == 22
    assert sample_rows[0].mutation_position == 94
    assert sample_rows[0].cancer == "Lung (NSCLC)"


def test_header_only():
    with pytest.raises(EmptyFile):
        load_records(HEADER)
    with pytest.raises(EmptyFile):
        load_records("")


def test_bad_position_reports_row():
    text = HEADER + "94,AT,GAG,CAG,Glu,Gln,G>C,B,SN,Tv,Lung,X\nabc,AT,GAG,CAG,Glu,Gln,G>C,B,SN,Tv,Lung,X\n"
    with pytest.raises(BadInteger) as exc:
        load_records(text)
    assert exc.value.row == 3 and exc.value.value == "abc"


def test_missing_column():
    with pytest.raises(MissingColumn):
        load_records(HEADER.replace(",cancer", "") + "1,a,b,c,d,e,f,g,h,i,j\n")


def test_header_case_and_quoted_labels():
    r = make_record(cancer="Carcinoma, not otherwise specified")
    text = dump_records([r]).replace("mutation_position", "Mutation_Position", 1)
    assert load_records(text) == [r]


def test_dump_load_round_trip(sample_rows):
    assert load_records(dump_records(sample_rows)) == sample_rows


# --- fitting ----------------------------------------------------------------

def test_fit_vocabulary_sorted():
    recs = [make_record(gene_location=g, cancer=c) for g, c in [("testis", "A"), ("Lung", "B"), ("Gastric", "A")]]
    assert fit_encoder(recs).vocabularies["gene_location"] == ("Gastric", "Lung", "testis")


def test_fit_position_range():
    recs = [make_record(pos=p, cancer=c) for p, c in [(163, "A"), (94, "B"), (232, "A")]]
    assert fit_encoder(recs).position_range == (94, 232)


def test_fit_errors():
    with pytest.raises(EmptyDataset):
        fit_encoder([])
    with pytest.raises(SingleClass):
        fit_encoder([make_record(cancer="A"), make_record(pos=5, cancer="A")])


def test_fit_order_invariant(sample_rows):
    e = fit_encoder(sample_rows)
    rng = random.Random(0)
    for _ in range(20):
        shuffled = sample_rows[:]
        rng.shuffle(shuffled)
        assert fit_encoder(shuffled) == e


# --- encoding ---------------------------------------------------------------

def test_encode_examples():
    recs = [make_record(pos=p, gene_location=g, cancer=c)
            for p, g, c in [(94, "Gastric", "A"), (163, "Lung", "B"), (232, "testis", "C")]]
    e = fit_encoder(recs)
    x, t = encode(recs[1], e)
    assert x[0] == 0.5 and x[10] == 0.5 and t == 0.5
    # a constant field encodes as 0
    assert x[1] == 0.0


def test_position_clamped():
    recs = [make_record(pos=100, cancer="A"), make_record(pos=200, cancer="B")]
    e = fit_encoder(recs)
    assert encode_inputs(make_record(pos=5), e)[0] == 0.0
    assert encode_inputs(make_record(pos=900), e)[0] == 1.0
    single = fit_encoder([make_record(pos=100, cancer="A"), make_record(pos=100, cancer="B")])
    assert encode_inputs(make_record(pos=7), single)[0] == 0.5


def test_golden_row_94(sample_rows):
    """Hand-applied encoding of the first sample row under the 22-row fit."""
    e = fit_encoder(sample_rows)
    x, t = encode(sample_rows[0], e)
    expected = [
        0.0,      # position 94 is the minimum
        1.0,      # wt_codon GT is last of AT, GT
        8 / 13,   # GAG is 9th of 14
        1 / 17,   # CAG is 2nd of 18
        2 / 9,    # Glu is 3rd of 10
        3 / 10,   # Gln is 4th of 11
        4 / 13,   # G>C is 5th of 14
        0.0,      # B is first of 5
        0.0,      # SN is the only type_1
        1.0,      # Tv is last of 4
        4 / 10,   # Lung is 5th of 11
    ]
    assert x.tolist() == pytest.approx(expected, abs=0, rel=1e-15)
    assert t == 6 / 10
    assert e.labels[6] == "Lung (NSCLC)"


def test_unknown_category_and_label(sample_rows):
    e = fit_encoder(sample_rows)
    with pytest.raises(UnknownCategory) as exc:
        encode_inputs(replace(sample_rows[0], gene_location="Mars"), e)
    assert exc.value.field == "gene_location"
    with pytest.raises(UnknownLabel):
        encode(replace(sample_rows[0], cancer="Unseen"), e)


def test_components_in_unit_interval(sample_rows):
    e = fit_encoder(sample_rows)
    X, T = encode_all(sample_rows, e)
    assert X.shape == (22, 11) and T.shape == (22, 1)
    assert ((X >= 0) & (X <= 1)).all() and ((T >= 0) & (T <= 1)).all()


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 1200), st.sampled_from("abcde"), st.sampled_from("PQR")),
                min_size=2, max_size=30))
def test_random_records_encode_into_unit_cube(rows):
    recs = [make_record(pos=p, gene_location=g, cancer=c) for p, g, c in rows]
    if len({r.cancer for r in recs}) < 2:
        recs.append(make_record(cancer="Z"))
    e = fit_encoder(recs)
    X, T = encode_all(recs, e)
    assert ((X >= 0) & (X <= 1)).all() and ((T >= 0) & (T <= 1)).all()


# --- decoding ---------------------------------------------------------------

def test_decode_examples(sample_rows):
    e = fit_encoder(sample_rows)
    assert decode_label(0.0, e) == e.labels[0]
    assert decode_label(1.0, e) == e.labels[-1]
    assert decode_label(-3.0, e) == e.labels[0] and decode_label(7.0, e) == e.labels[-1]
    three = fit_encoder([make_record(cancer=c) for c in "ABC"])
    assert decode_label(0.49, three) == "B"
    # exact midpoint goes to the lower index
    assert decode_label(0.25, three) == "A"


def test_decode_round_trip_many():
    cases = 0
    for c in range(2, 60):
        e = fit_encoder([make_record(cancer=f"label {i:03d}") for i in range(c)])
        for label in e.labels:
            assert decode_label(e.target(label), e) == label
            cases += 1
    assert cases >= 1000


# --- split ------------------------------------------------------------------

def test_split_examples(sample_rows):
    train, test = split(sample_rows, 0.25, 42)
    assert (len(test), len(train)) == (6, 16)
    assert split(sample_rows, 0.25, 42) == (train, test)
    all_train, none = split(sample_rows, 0.0, 42)
    assert none == [] and sorted(all_train, key=repr) == sorted(sample_rows, key=repr)
    with pytest.raises(ValueError):
        split(sample_rows, 1.0, 0)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 40), st.floats(0, 0.99), st.integers(0, 2**32 - 1))
def test_split_partitions(n, fraction, seed):
    recs = [make_record(pos=i + 1) for i in range(n)]
    train, test = split(recs, fraction, seed)
    assert len(test) == int(np.ceil(n * fraction))
    assert sorted(r.mutation_position for r in train + test) == list(range(1, n + 1))


def test_encoder_json_round_trip(sample_rows):
    e = fit_encoder(sample_rows)
    from tp53nn.dataset import Encoder
    assert Encoder.from_json(e.to_json()) == e
    assert list(e.to_json()["vocabularies"]) == list(CATEGORICAL)
