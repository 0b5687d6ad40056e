import csv
import pathlib

import pytest

DATA = pathlib.Path(__file__).parent / "data"


def load_curve(name):
    with open(DATA / name) as fh:
        return [(float(r["t"]), float(r["f"])) for r in csv.DictReader(fh)]


@pytest.fixture(scope="session")
def curve_a01():
    return load_curve("curve_a01.csv")


@pytest.fixture(scope="session")
def curve_a02():
    return load_curve("curve_a02.csv")
