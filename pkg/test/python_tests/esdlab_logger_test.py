import esdlab


def test_logger_init():
    assert esdlab.severity_type.Debug == 0
    assert esdlab.severity_type.Info == 1
    assert esdlab.severity_type.Warn == 2
    assert esdlab.severity_type.Error == 3
    assert esdlab.severity_type.None_ == 4
    default = esdlab.logger.get_severity()
    esdlab.logger.set_severity(esdlab.severity_type.Debug)
    assert esdlab.logger.get_severity() == esdlab.severity_type.Debug
    esdlab.logger.set_severity(default)
    assert esdlab.logger.get_severity() == default


def test_settings_do_not_override_environment(monkeypatch):
    monkeypatch.setenv("ESDLAB_FONT", "Liberation Sans")
    esdlab.bootstrap_env()
    assert esdlab.os.environ["ESDLAB_FONT"] == "Liberation Sans"
    monkeypatch.delenv("ESDLAB_PAIRS_PER_SETTING", raising=False)
    esdlab.bootstrap_env()
    assert esdlab.os.environ["ESDLAB_PAIRS_PER_SETTING"] == "10000"
