import json
import math

import numpy as np
import pytest

from spiralwave import __version__
from spiralwave.core import settings
from spiralwave.core.exceptions import OutputError
from spiralwave.utils.serialization import atomic_write, format_value, render_csv, render_json, sha256, to_plain

from ..config import build_config
from ..outputs import MANIFEST, Artifact, write_outputs
from .conftest import read_json, snapshot


class TestSerialization:
    def test_floats_round_trip(self):
        for value in (0.1, 1 / 3, -2.5e-17, 6.0):
            assert float(format_value(value)) == value
        assert format_value(np.float64(0.1)) == format_value(0.1)

    def test_integers_and_flags(self):
        assert format_value(np.int64(7)) == "7"
        assert format_value(True) == "1"
        assert format_value(np.bool_(False)) == "0"

    def test_csv_layout(self):
        payload = render_csv(["n", "lambda"], [(0, 2.0), (1, 6.0)])
        assert payload == b"n,lambda\n0,2\n1,6\n"

    def test_json_is_sorted_and_plain(self):
        payload = render_json({"b": np.array([1.5, np.nan]), "a": np.int32(3), "c": (np.True_,)})
        assert payload.endswith(b"\n")
        data = json.loads(payload)
        assert list(data) == ["a", "b", "c"]
        assert data == {"a": 3, "b": [1.5, None], "c": [True]}

    def test_to_plain_drops_infinities(self):
        assert to_plain({"x": math.inf}) == {"x": None}

    def test_atomic_write_replaces(self, tmp_path):
        target = tmp_path / "nested" / "file.txt"
        atomic_write(target, b"first")
        atomic_write(target, b"second")
        assert target.read_bytes() == b"second"
        assert [path.name for path in target.parent.iterdir()] == ["file.txt"]

    def test_atomic_write_reports_path(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        with pytest.raises(OutputError) as excinfo:
            atomic_write(blocker / "file.txt", b"data")
        assert excinfo.value.details["path"] == str(blocker / "file.txt")
        assert excinfo.value.exit_code == 2


class TestWriteOutputs:
    @pytest.fixture
    def config(self):
        return build_config("eig", {}, {"m": 2})

    @pytest.fixture
    def artifacts(self):
        return [
            Artifact.json("summary.json", {"omega": 0.05}),
            Artifact.columns("profile.csv", ["s", "u"], np.array([0.0, 0.5]), np.array([1.0, 0.25])),
        ]

    def test_manifest_lists_files(self, tmp_path, config, artifacts):
        manifest = write_outputs(artifacts, tmp_path, config)
        assert [entry["name"] for entry in manifest["files"]] == ["profile.csv", "summary.json"]
        for entry in manifest["files"]:
            payload = (tmp_path / entry["name"]).read_bytes()
            assert entry["sha256"] == sha256(payload)
            assert entry["bytes"] == len(payload)
        on_disk = read_json(tmp_path / MANIFEST)
        assert on_disk["config_hash"] == config.digest()
        assert on_disk["config"]["m"] == 2
        assert on_disk["command"] == "eig"
        assert on_disk["version"] == __version__

    def test_manifest_records_environment(self, tmp_path, config, artifacts, monkeypatch):
        monkeypatch.setattr(settings, "ENVIRONMENT", "production")
        manifest = write_outputs(artifacts, tmp_path, config)
        assert read_json(tmp_path / MANIFEST)["environment"] == "production"
        assert "environment" not in manifest["config"]
        assert manifest["config_hash"] == config.digest()

    def test_identical_inputs_identical_bytes(self, tmp_path, config, artifacts):
        write_outputs(artifacts, tmp_path / "a", config)
        write_outputs(list(reversed(artifacts)), tmp_path / "b", config)
        assert snapshot(tmp_path / "a") == snapshot(tmp_path / "b")

    def test_profile_columns(self, tmp_path, config, artifacts):
        write_outputs(artifacts, tmp_path, config)
        assert (tmp_path / "profile.csv").read_text() == "s,u\n0,1\n0.5,0.25\n"

    @pytest.mark.parametrize("names", [["x.json", "x.json"], [MANIFEST]])
    def test_rejects_clashing_names(self, tmp_path, config, names):
        with pytest.raises(ValueError):
            write_outputs([Artifact.json(name, {}) for name in names], tmp_path, config)
