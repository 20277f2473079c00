from src import config


def test_budget_defaults(monkeypatch):
    monkeypatch.delenv("DYAD_BUDGET", raising=False)
    monkeypatch.delenv("DYAD_ORACLE_BUDGET", raising=False)
    assert config.default_budget() == 10**7
    assert config.default_oracle_budget() == 10**8


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("DYAD_BUDGET", "500")
    assert config.default_budget() == 500


def test_bad_budget_is_ignored(monkeypatch, caplog):
    monkeypatch.setenv("DYAD_BUDGET", "lots")
    assert config.default_budget() == config.DEFAULT_BUDGET
    assert "DYAD_BUDGET" in caplog.text
    monkeypatch.setenv("DYAD_BUDGET", "-4")
    assert config.default_budget() == config.DEFAULT_BUDGET


def test_db_path(monkeypatch, tmp_path):
    monkeypatch.setenv("DYAD_DB", str(tmp_path / "x.db"))
    assert config.default_db_path() == tmp_path / "x.db"
    monkeypatch.delenv("DYAD_DB")
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path))
    assert config.default_db_path() == tmp_path / "dyad" / "runs.db"
