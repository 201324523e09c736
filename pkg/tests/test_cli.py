import csv
import json
import math

import numpy as np
import pytest

from weakosc import cli
from weakosc.asympt import envelope_fit
from weakosc.errors import ConfigError
from weakosc.plots import line_chart

BASIC = "name=bessel\nfamily=bessel\nomega=1\n"


def test_parse_defaults():
    cfg = cli.parse_config(BASIC)
    assert cfg.forcing_descriptor == "zero"
    assert cfg.tol == 1e-10
    assert cfg.horizon == pytest.approx(1.0 + 400 * 2 * math.pi)
    assert cfg.windows == ((cfg.horizon / 4, cfg.horizon / 2), (cfg.horizon / 2, cfg.horizon))


def test_parse_sections_comments_and_windows():
    text = ("# comment\n[scenario]\nname = demo\n; other comment\n[system]\nfamily = power:a=1,b=1\n"
            "omega = 2\nforcing = \n[integration]\ntol = 1e-9\nhorizon = 300\n[analysis]\n"
            "windows = 100:200, 200:300\n")
    cfg = cli.parse_config(text)
    assert (cfg.name, cfg.omega, cfg.tol, cfg.horizon) == ("demo", 2.0, 1e-9, 300.0)
    assert cfg.forcing_descriptor == "zero"
    assert cfg.windows == ((100.0, 200.0), (200.0, 300.0))


@pytest.mark.parametrize("text, line, key", [
    ("name=a\nfamily=bessel\nomega=abc\n", 3, "omega"),
    ("name=a\nfamily=bessel\nomega=1\ncolour=red\n", 4, "colour"),
    ("name=a\nomega=1\n", None, "family"),
    ("name=a\nfamily=bessel\nomega=1\ntol=1e-3\n", 4, "tol"),
    ("name=a\nfamily=bessel\nomega=1\nhorizon=50\n", 4, "horizon"),
    ("name=a\nfamily=warp\nomega=1\n", 2, "family"),
    ("name=a\nfamily=bessel\nomega=1\nwindows=10\n", 4, "windows"),
    ("name=a\nfamily=bessel\nomega=0\n", 3, "omega"),
    ("name=a\nfamily=bessel\nomega=1\nomega=2\n", 4, "omega"),
])
def test_parse_errors_carry_location(text, line, key):
    with pytest.raises(ConfigError) as info:
        cli.parse_config(text)
    assert info.value.key == key
    assert info.value.line == line


def test_unknown_section():
    with pytest.raises(ConfigError) as info:
        cli.parse_config("[extra]\n" + BASIC)
    assert info.value.line == 1


def test_builtin_registry():
    assert len(cli.BUILTIN_SCENARIOS) >= 5
    for name in cli.BUILTIN_SCENARIOS:
        assert cli.builtin_config(name).name == name
    with pytest.raises(ConfigError):
        cli.builtin_config("nope")


def test_load_config_file(tmp_path):
    p = tmp_path / "s.cfg"
    p.write_text(BASIC)
    assert cli.load_config(str(p)).name == "bessel"
    assert cli.load_config("power-decay").omega == 1.0
    with pytest.raises(ConfigError):
        cli.load_config(str(tmp_path / "missing.cfg"))


_REPORTS: dict = {}


def report_for(name):
    if name not in _REPORTS:
        _REPORTS[name] = cli.run_scenario(cli.builtin_config(name), plots=False)
    return _REPORTS[name]


def _verdicts(report):
    return {v.statement: v.result for v in report.verdicts}


def test_bessel_unforced_run():
    rep, _ = report_for("bessel-unforced")
    assert rep.exit_code == 0, [c.name for c in rep.failed]
    assert _verdicts(rep)["B"] == "holds"
    assert rep.preservation.classification == "preserved"


def test_power_decay_run():
    rep, _ = report_for("power-decay")
    assert rep.exit_code == 0, [c.name for c in rep.failed]
    v = _verdicts(rep)
    assert v["C"] == v["D"] == "holds"


def test_resonant_run():
    rep, _ = report_for("resonant-counterexample")
    assert rep.exit_code == 0, [c.name for c in rep.failed]
    v = _verdicts(rep)
    assert v["C"] == v["D"] == "fails"
    assert rep.preservation.classification == "not preserved"


def test_certifications_name_anchor():
    rep, _ = report_for("power-decay")
    assert all(c.anchor for c in rep.certifications)
    names = {c.name for c in rep.certifications}
    assert "filter y2 K3 reconstruction" in names
    assert "W fit vs predicted (c1, c2) amplitude" in names


def test_main_exit_codes(tmp_path, capsys):
    assert cli.main(["list-scenarios"]) == cli.EXIT_OK
    assert "power-decay" in capsys.readouterr().out
    bad = tmp_path / "bad.cfg"
    bad.write_text("name=a\nfamily=bessel\nomega=abc\n")
    assert cli.main(["run", str(bad), "--out", str(tmp_path / "o1")]) == cli.EXIT_CONFIG
    assert "line 3" in capsys.readouterr().err
    # integrable damping is outside the weak class
    strong = tmp_path / "strong.cfg"
    strong.write_text("name=s\nfamily=power:a=1,b=2\nomega=1\nforcing=powerdecay:g=2\n")
    assert cli.main(["run", str(strong), "--out", str(tmp_path / "o2")]) == cli.EXIT_CERT_FAILURE
    # logA = 50 (1+t)^0.4 - 50 passes 300 near t = 640
    blow = tmp_path / "blow.cfg"
    blow.write_text("name=b\nfamily=power:a=20,b=0.6\nomega=1\n")
    assert cli.main(["run", str(blow), "--out", str(tmp_path / "o3")]) == cli.EXIT_NUMERIC
    assert "last t" in capsys.readouterr().err


def test_certify_command(capsys):
    assert cli.main(["certify", "bessel-unforced"]) == cli.EXIT_OK
    assert "FAIL" not in capsys.readouterr().out


def test_run_overrides_and_outputs(tmp_path):
    out = tmp_path / "run"
    code = cli.main(["run", "power-decay", "--out", str(out), "--horizon", "400", "--tol", "1e-9"])
    assert code == cli.EXIT_OK
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["horizon"] == 400.0 and summary["config"]["tol"] == 1e-9
    for f in ("trajectory.csv", "verdicts.csv", "fits.csv", "kernels.csv", "certifications.csv",
              "envelope.svg", "u2v2.svg", "fit.svg"):
        assert (out / f).stat().st_size > 0, f
    with (out / "certifications.csv").open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == cli.CERT_CSV_HEADER
    assert all(r[5] for r in rows[1:])


def test_outputs_deterministic(tmp_path):
    cfg = cli.builtin_config("bessel-expdecay")
    cli.run_scenario(cfg, tmp_path / "a")
    cli.run_scenario(cfg, tmp_path / "b")
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(files) == 9
    for f in files:
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes(), f


def test_zero_solution_plots(tmp_path):
    cfg = cli.parse_config("name=zero\nfamily=power:a=1,b=1\nomega=1\nhorizon=260\n")
    rep, tr = cli.run_scenario(cfg, tmp_path)
    assert np.all(tr.x == 0.0)
    for f in ("envelope.svg", "u2v2.svg", "fit.svg"):
        text = (tmp_path / f).read_text()
        assert "nan" not in text.lower() and "<polyline" in text
    assert rep.preservation.preserved


def test_resonant_fit_amplitude_grows():
    _, tr = report_for("resonant-counterexample")
    t_end = tr.times[-1]
    early = envelope_fit(tr, (t_end / 8, t_end / 4)).amplitude
    late = envelope_fit(tr, (t_end / 2, t_end)).amplitude
    assert late > 1.5 * early


def test_line_chart_svg(tmp_path):
    t = np.linspace(0, 10, 5000)
    p = line_chart(tmp_path / "c.svg", "demo <a&b>", [("s", t, np.sin(t)), ("n", t, np.full_like(t, np.nan))])
    text = p.read_text()
    assert text.startswith("<?xml") and 'width="960"' in text and 'height="480"' in text
    assert "&lt;a&amp;b&gt;" in text
    assert "nan" not in text.lower()
