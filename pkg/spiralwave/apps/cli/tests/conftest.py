import csv
import json

import numpy as np
import pytest


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def snapshot(directory):
    """File name to bytes for every regular file in directory."""
    return {path.name: path.read_bytes() for path in sorted(directory.iterdir()) if path.is_file()}


@pytest.fixture
def bad_profile(tmp_path):
    # a = 2s breaks the unit-speed condition a'^2 + atilde'^2 = 1
    path = tmp_path / "bad.csv"
    rows = ["s,a,atilde"] + [f"{s:.3f},{2 * s:.3f},0" for s in (0.0, 0.25, 0.5, 0.75, 1.0)]
    path.write_text("\n".join(rows) + "\n")
    return path


@pytest.fixture
def cap_profile(tmp_path):
    """Upper hemisphere sampled densely enough to pass validation."""
    path = tmp_path / "cap.csv"
    s = np.linspace(0.0, np.pi / 2, 4001)
    rows = ["s,a,atilde"] + [f"{x:.17g},{np.sin(x):.17g},{np.cos(x):.17g}" for x in s]
    path.write_text("\n".join(rows) + "\n")
    return path
