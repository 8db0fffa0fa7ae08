"""CSV ingestion and export round trips."""

from fractions import Fraction

import pytest

from validus.csvio import CsvFormatError, dataset_from_csv, read_table, write_table
from validus.errors import DuplicateKeyError
from validus.model import NA, DataPoint, Key, build_dataset

PERSON_CSV = "id,age,job\n1,25,unemployed\n2,employed,42\n"


def test_read_person_table():
    points = dict((p.key, p.value) for p in read_table("person", PERSON_CSV))
    assert points[Key("person", None, "1", "age")] == Fraction(25)
    assert points[Key("person", None, "1", "job")] == "unemployed"
    assert points[Key("person", None, "2", "age")] == "employed"
    assert points[Key("person", None, "2", "job")] == Fraction(42)


def test_na_and_empty_cells():
    points = dict((p.key, p.value) for p in read_table("t", "id,a,b\n1,NA,\n"))
    assert points[Key("t", None, "1", "a")] is NA
    assert points[Key("t", None, "1", "b")] is NA


def test_numeric_then_text_fallback():
    points = dict((p.key, p.value) for p in read_table("t", "id,a\n1,2.5\n2,hello\n"))
    assert points[Key("t", None, "1", "a")] == Fraction(5, 2)
    assert points[Key("t", None, "2", "a")] == "hello"


def test_time_column():
    text = "id,time,price\n1,2020,10\n1,2021,12\n"
    ds = dataset_from_csv({"shop": text})
    assert ds.times("shop") == ["2020", "2021"]
    assert ds.get(Key("shop", "2021", "1", "price")) == Fraction(12)


def test_missing_unit_column():
    with pytest.raises(CsvFormatError):
        read_table("t", "name,a\nx,1\n")


def test_ragged_row_rejected():
    with pytest.raises(CsvFormatError):
        read_table("t", "id,a,b\n1,2\n")


def test_duplicate_record_rejected():
    with pytest.raises(DuplicateKeyError):
        dataset_from_csv({"t": "id,a\n1,1\n1,2\n"})


def test_quoted_cells_round_trip():
    text = 'id,note\n1,"hello, world"\n2,"say ""hi"""\n'
    ds = dataset_from_csv({"t": text})
    assert ds.get(Key("t", None, "1", "note")) == "hello, world"
    assert ds.get(Key("t", None, "2", "note")) == 'say "hi"'
    again = dataset_from_csv({"t": write_table(ds, "t")})
    assert again == ds


def test_ingest_export_ingest_equality():
    ds = dataset_from_csv({"person": PERSON_CSV})
    exported = write_table(ds, "person")
    assert dataset_from_csv({"person": exported}) == ds


def test_export_with_time_and_na():
    points = [
        DataPoint(Key("t", "1", "u", "a"), Fraction(1)),
        DataPoint(Key("t", "2", "u", "a"), NA),
    ]
    ds = build_dataset(points)
    text = write_table(ds, "t")
    assert text.splitlines()[0] == "id,time,a"
    assert dataset_from_csv({"t": text}) == ds


def test_export_is_deterministic():
    ds = dataset_from_csv({"person": PERSON_CSV})
    assert write_table(ds, "person") == write_table(ds, "person")
