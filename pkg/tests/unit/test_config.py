import pytest

from phasetk.core.config import Settings, get_settings, normalise_integrator


def test_settings_defaults():
    settings = get_settings()
    assert settings.APP_NAME == "phasetk"
    assert settings.INTEGRATOR is None
    assert settings.TOL_SYMP == pytest.approx(1e-9)


def test_tolerances_only_lists_tol_fields():
    tolerances = get_settings().tolerances()
    assert "tol_symp" in tolerances
    assert "tol_ebk" in tolerances
    assert all(name.startswith("tol_") for name in tolerances)


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("PTK_INTEGRATOR", "Gauss-Legendre")
    monkeypatch.setenv("PTK_THREADS", "4")
    monkeypatch.setenv("PTK_LOG_FORMAT", "JSON")
    settings = Settings()
    assert settings.INTEGRATOR == "gauss4"
    assert settings.THREADS == 4
    assert settings.LOG_FORMAT == "json"


def test_rejects_unknown_log_format(monkeypatch):
    monkeypatch.setenv("PTK_LOG_FORMAT", "xml")
    with pytest.raises(ValueError):
        Settings()


@pytest.mark.parametrize(
    "spelling, expected",
    [
        ("midpoint", "midpoint"),
        ("Implicit-Midpoint", "midpoint"),
        ("gauss_legendre", "gauss4"),
        ("Stormer-Verlet", "verlet"),
    ],
)
def test_normalise_integrator(spelling, expected):
    assert normalise_integrator(spelling) == expected


def test_normalise_integrator_rejects_unknown():
    with pytest.raises(ValueError, match="unknown integrator"):
        normalise_integrator("rk45")
