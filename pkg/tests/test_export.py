import numpy as np
import pandas as pd

from app.core.model import WignerGrid, make_grid
from app.data.export import build_id, read_frame, read_metadata, write_frame, write_json, write_wigner


def test_frame_round_trip_with_metadata(tmp_path):
    frame = pd.DataFrame({"a": [1.0, 2.5], "b": [np.pi, -1e-20]})
    path = write_frame(frame, tmp_path / "t.csv", {"G": 10.0, "source": "exact"})
    meta = read_metadata(path)
    assert meta["G"] == "10.0"
    assert meta["build"] == build_id()
    back = read_frame(path)
    np.testing.assert_allclose(back["b"], frame["b"], rtol=1e-11)


def test_writes_are_deterministic(tmp_path):
    frame = pd.DataFrame({"x": np.linspace(0, 1, 7)})
    first = write_frame(frame, tmp_path / "a.csv", {"k": 1}).read_bytes()
    second = write_frame(frame, tmp_path / "b.csv", {"k": 1}).read_bytes()
    assert first == second


def test_wigner_files(tmp_path):
    grid = make_grid(((-1, 1), (-1, 1)), 5, 5)
    values = np.full(grid.shape, np.exp(-2.0))
    values[0, 0] = 0.0
    plain, neg = write_wigner(WignerGrid(grid, values), tmp_path, "exact")
    assert plain.name == "wigner_exact.csv"
    assert neg.name == "neg_log_wigner_exact.csv"
    table = read_frame(neg)
    assert list(table.columns) == ["x", "p", "neg_log_W"]
    assert table["neg_log_W"].iloc[0] == 30.0
    assert table["neg_log_W"].iloc[1] == 2.0


def test_json_handles_complex_and_numpy(tmp_path):
    path = write_json({"z": 1 + 2j, "arr": np.arange(3), "flag": np.bool_(True)}, tmp_path / "r.json")
    text = path.read_text(encoding="utf-8")
    assert '"re": 1.0' in text
    assert '"flag": true' in text
