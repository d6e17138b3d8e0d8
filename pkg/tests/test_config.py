import pytest

from app.core.errors import ConfigError, DegenerateGrid, NonPositiveEta
from app.data.config import RunConfig, Settings, load_settings


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for key in ("G", "Delta", "eta", "fock_cutoff", "seed", "out", "nx", "np"):
        monkeypatch.delenv(f"CATRON_{key}", raising=False)
    monkeypatch.chdir(tmp_path)


def test_defaults():
    settings = load_settings()
    assert settings == Settings()
    assert settings.params.G == 10.0
    assert settings.grid.shape == (241, 241)


def test_file_env_and_overrides(tmp_path, monkeypatch):
    cfg = tmp_path / "run.env"
    cfg.write_text("G=8\nDelta=3\nnx=101\nseed=4\n", encoding="utf-8")
    monkeypatch.setenv("CATRON_Delta", "5")
    settings = load_settings(str(cfg), overrides={"seed": 9, "eta": None})
    assert settings.G == 8.0
    assert settings.Delta == 5.0
    assert settings.n_x == 101
    assert settings.seed == 9
    assert settings.eta == 1.0


def test_bad_number(tmp_path):
    cfg = tmp_path / "run.env"
    cfg.write_text("G=lots\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_settings(str(cfg))


def test_missing_file():
    with pytest.raises(ConfigError):
        load_settings("does-not-exist.env")


def test_invalid_physics_fails_early(tmp_path):
    cfg = tmp_path / "run.env"
    cfg.write_text("eta=0\n", encoding="utf-8")
    with pytest.raises(NonPositiveEta):
        load_settings(str(cfg))
    with pytest.raises(DegenerateGrid):
        load_settings(overrides={"n_x": 2})


def test_echo_round_trip(tmp_path):
    settings = load_settings(overrides={"G": 6.5, "out": str(tmp_path / "o")})
    path = RunConfig(settings, "wigner", {"source": "exact"}).write_echo(tmp_path)
    assert path.name == "config_echo.env"
    assert load_settings(str(path)) == settings
