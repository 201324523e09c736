"""Scenario registry, configuration parsing, the run pipeline and the command line."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import asympt, conditions, filters, resolvent
from .coeffs import parse_family, parse_forcing, validate_hypotheses
from .errors import ConfigError, IntegrationError, TailDivergenceError, WeakOscError
from .integrate import (TOL_MAX, TOL_MIN, Grid, SystemSpec, Trajectory, integrate_forced,
                        integrate_undamped_crosscheck)
from .plots import line_chart

EXIT_OK = 0
EXIT_CERT_FAILURE = 2
EXIT_CONFIG = 3
EXIT_NUMERIC = 4

MIN_HORIZON_PERIODS = 40.0
DEFAULT_PERIODS = 400.0
SAMPLES_PER_PERIOD = 64
FILTER_SPAN = 50.0
FILTER_TOL = 1e-12
FILTER_ATOL = 1e-6
W_RTOL = 1e-8
CERT_CSV_HEADER = ["name", "passed", "value", "limit", "margin", "anchor"]

BUILTIN_SCENARIOS: dict[str, tuple[str, str]] = {
    "bessel-unforced": (
        "unforced p = 1/t from t0 = 1 with J0 initial data",
        "[scenario]\nname = bessel-unforced\n[system]\nfamily = bessel\nomega = 1\n"
        "xi0 = 0.76519768655796655\nxi1 = -0.44005058574493355\nforcing = zero\n",
    ),
    "bessel-expdecay": (
        "p = 1/t forced by exp(-t) from rest",
        "[scenario]\nname = bessel-expdecay\n[system]\nfamily = bessel\nomega = 1\n"
        "forcing = exp:rate=1\n",
    ),
    "power-decay": (
        "p = 1/(1+t) forced by (1+t)^-2 from rest",
        "[scenario]\nname = power-decay\n[system]\nfamily = power:a=1,b=1\nomega = 1\n"
        "forcing = powerdecay:g=2\n",
    ),
    "power-slow-unforced": (
        "p = (1+t)^-0.75, unforced, omega = 1.5",
        "[scenario]\nname = power-slow-unforced\n[system]\nfamily = power:a=1,b=0.75\n"
        "omega = 1.5\nxi0 = 1\nxi1 = 0\n",
    ),
    "resonant-counterexample": (
        "p = 1/(1+t) with f built so that y1 = cos(wt)/sqrt(1+t)",
        "[scenario]\nname = resonant-counterexample\n[system]\nfamily = power:a=1,b=1\n"
        "omega = 1\nforcing = resonant:g=0.5\n",
    ),
}


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    family_descriptor: str
    forcing_descriptor: str
    omega: float
    xi0: float = 0.0
    xi1: float = 0.0
    horizon: float = math.nan
    tol: float = 1e-10
    windows: tuple[tuple[float, float], ...] = ()

    @property
    def t0(self) -> float:
        return parse_family(self.family_descriptor).t0

    @property
    def period(self) -> float:
        return 2.0 * math.pi / abs(self.omega)

    def echo(self) -> dict:
        return {"name": self.name, "family": self.family_descriptor, "forcing": self.forcing_descriptor,
                "omega": self.omega, "xi0": self.xi0, "xi1": self.xi1, "horizon": self.horizon,
                "tol": self.tol, "windows": [list(w) for w in self.windows]}


SECTIONS = {"scenario", "system", "integration", "analysis"}
KNOWN_KEYS = {"name", "family", "forcing", "omega", "xi0", "xi1", "horizon", "tol", "windows"}
REQUIRED_KEYS = ("name", "family", "omega")


def _number(val: str, line: int, key: str) -> float:
    try:
        out = float(val)
    except ValueError:
        raise ConfigError(f"malformed number {val!r}", line, key) from None
    if not math.isfinite(out):
        raise ConfigError(f"non-finite number {val!r}", line, key)
    return out


def _windows(val: str, line: int) -> tuple[tuple[float, float], ...]:
    out = []
    for item in filter(None, (s.strip() for s in val.replace(";", ",").split(","))):
        lo, sep, hi = item.partition(":")
        if not sep:
            raise ConfigError(f"window {item!r} must be lo:hi", line, "windows")
        a, b = _number(lo, line, "windows"), _number(hi, line, "windows")
        if b <= a:
            raise ConfigError(f"window {item!r} is empty", line, "windows")
        out.append((a, b))
    return tuple(out)


def parse_config(text: str) -> ScenarioConfig:
    """Parse line-oriented ``key = value`` text with optional ``[section]`` headers.

    Blank lines and lines starting with ``#`` or ``;`` are ignored.
    """
    raw: dict[str, tuple[str, int]] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("["):
            if not s.endswith("]"):
                raise ConfigError(f"malformed section header {s!r}", n)
            sec = s[1:-1].strip().lower()
            if sec not in SECTIONS:
                raise ConfigError(f"unknown section [{sec}]", n)
            continue
        key, eq, val = s.partition("=")
        key = key.strip().lower()
        if not eq:
            raise ConfigError(f"expected key = value, got {s!r}", n)
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", n, key)
        if key in raw:
            raise ConfigError(f"duplicate key (first on line {raw[key][1]})", n, key)
        raw[key] = (val.strip(), n)
    for key in REQUIRED_KEYS:
        if key not in raw or not raw[key][0]:
            raise ConfigError("missing required key", raw.get(key, ("", None))[1], key)

    def num(key, default):
        if key not in raw or not raw[key][0]:
            return default
        return _number(raw[key][0], raw[key][1], key)

    omega = num("omega", None)
    if omega == 0:
        raise ConfigError("omega must be non-zero", raw["omega"][1], "omega")
    family_desc = raw["family"][0]
    try:
        fam = parse_family(family_desc)
    except WeakOscError as exc:
        raise ConfigError(str(exc), raw["family"][1], "family") from None
    forcing_desc = raw.get("forcing", ("", 0))[0] or "zero"
    try:
        parse_forcing(forcing_desc, omega)
    except WeakOscError as exc:
        raise ConfigError(str(exc), raw["forcing"][1], "forcing") from None
    period = 2.0 * math.pi / abs(omega)
    horizon = num("horizon", fam.t0 + DEFAULT_PERIODS * period)
    tol = num("tol", 1e-10)
    windows = _windows(*raw["windows"]) if "windows" in raw and raw["windows"][0] else ()
    cfg = ScenarioConfig(raw["name"][0], family_desc, forcing_desc, omega, num("xi0", 0.0),
                         num("xi1", 0.0), horizon, tol, windows)
    return validate_config(cfg, line_of={k: v[1] for k, v in raw.items()})


def validate_config(cfg: ScenarioConfig, line_of: dict[str, int] | None = None) -> ScenarioConfig:
    """Check invariants and fill default envelope windows."""
    line_of = line_of or {}
    t0 = cfg.t0
    if cfg.horizon - t0 < MIN_HORIZON_PERIODS * cfg.period * (1 - 1e-12):
        raise ConfigError(f"horizon must cover at least {MIN_HORIZON_PERIODS:g} periods past t0={t0:g}",
                          line_of.get("horizon"), "horizon")
    if not (TOL_MIN <= cfg.tol <= TOL_MAX):
        raise ConfigError(f"tol must lie in [{TOL_MIN:g}, {TOL_MAX:g}]", line_of.get("tol"), "tol")
    windows = cfg.windows or ((cfg.horizon / 4.0, cfg.horizon / 2.0), (cfg.horizon / 2.0, cfg.horizon))
    for lo, hi in windows:
        if lo < t0 or hi > cfg.horizon:
            raise ConfigError(f"window {lo:g}:{hi:g} outside [t0, horizon]", line_of.get("windows"),
                              "windows")
        if hi - lo < asympt.MIN_FIT_PERIODS * cfg.period * (1 - 1e-9):
            raise ConfigError(f"window {lo:g}:{hi:g} shorter than {asympt.MIN_FIT_PERIODS:g} periods",
                              line_of.get("windows"), "windows")
    return replace(cfg, windows=tuple(windows))


def builtin_config(name: str) -> ScenarioConfig:
    if name not in BUILTIN_SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; try list-scenarios")
    return parse_config(BUILTIN_SCENARIOS[name][1])


def load_config(ref: str) -> ScenarioConfig:
    """Read a config file, falling back to a built-in scenario name."""
    path = Path(ref)
    if path.is_file():
        return parse_config(path.read_text(encoding="utf-8"))
    if ref in BUILTIN_SCENARIOS:
        return builtin_config(ref)
    raise ConfigError(f"no config file or built-in scenario named {ref!r}")


# --------------------------------------------------------------------------
# report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Certification:
    name: str
    passed: bool
    value: float
    limit: float
    anchor: str

    @property
    def margin(self) -> float:
        return self.limit - self.value

    def row(self) -> list[str]:
        return [self.name, "pass" if self.passed else "fail", f"{self.value:.17g}",
                f"{self.limit:.17g}", f"{self.margin:.17g}", self.anchor]


def _cert(name: str, value: float, limit: float, anchor: str) -> Certification:
    value = float(value)
    return Certification(name, bool(math.isfinite(value) and value <= limit), value, float(limit), anchor)


@dataclass
class RunReport:
    config: ScenarioConfig
    verdicts: list = field(default_factory=list)
    fits: list = field(default_factory=list)
    certifications: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)
    contradictions: list = field(default_factory=list)
    preservation: object = None
    converse: object = None
    limits: object = None

    @property
    def failed(self) -> list[Certification]:
        return [c for c in self.certifications if not c.passed]

    @property
    def exit_code(self) -> int:
        return EXIT_OK if not self.failed and not self.contradictions else EXIT_CERT_FAILURE

    def summary(self) -> dict:
        out = {
            "config": self.config.echo(),
            "verdicts": {v.statement: v.result for v in self.verdicts},
            "contradictions": [list(p) for p in self.contradictions],
            "fits": [{"window": list(f.window), "c_sin": f.c_sin, "c_cos": f.c_cos,
                      "amplitude": f.amplitude, "phase": f.phase, "residual_rms": f.residual_rms}
                     for f in self.fits],
            "certifications": [{"name": c.name, "passed": c.passed, "value": c.value, "limit": c.limit,
                                "margin": c.margin, "anchor": c.anchor} for c in self.certifications],
            "artifacts": dict(sorted(self.artifacts.items())),
            "exit_code": self.exit_code,
        }
        if self.preservation is not None:
            out["preservation"] = {"classification": self.preservation.classification,
                                   "reasons": list(self.preservation.reasons),
                                   "amplitude_change": self.preservation.amplitude_change,
                                   "phase_drift": self.preservation.phase_drift}
        if self.limits is not None:
            out["limits"] = {"Ic": self.limits.Ic, "Is": self.limits.Is,
                             "tail_bound": self.limits.tail_bound, "converged": self.limits.converged}
        if self.converse is not None:
            out["converse"] = {"sin_converged": self.converse.sin_limit_converged,
                               "cos_converged": self.converse.cos_limit_converged}
        return out


# --------------------------------------------------------------------------
# pipeline
# --------------------------------------------------------------------------

def filter_certifications(cfg: ScenarioConfig) -> tuple[list[Certification], Trajectory]:
    """Three-way filter agreement and the two W routes on a fine grid over [t0, t0 + 50]."""
    fam = parse_family(cfg.family_descriptor)
    forcing = parse_forcing(cfg.forcing_descriptor, cfg.omega)
    t0 = fam.t0
    t_end = min(cfg.horizon, max(FILTER_SPAN, t0 + 10 * cfg.period))
    dt = min(0.01, 0.1 / cfg.omega ** 2, cfg.period / 64)
    fine = integrate_forced(SystemSpec(cfg.omega, cfg.xi0, cfg.xi1, t0), fam, forcing,
                            Grid.spacing(t0, t_end, dt), FILTER_TOL)
    q1, q2 = filters.y_filters_quadrature(forcing, cfg.omega, fine.times)
    certs = [
        _cert("filter y1 ode vs quadrature", np.max(np.abs(q1.values - fine.y1)), FILTER_ATOL,
              "first exponential filter of the forcing"),
        _cert("filter y2 ode vs quadrature", np.max(np.abs(q2.values - fine.y2)), FILTER_ATOL,
              "second filter equals h convolved with f"),
    ]
    # y2 depends on f alone, so the reconstruction uses the response from rest
    rest = fine if cfg.xi0 == 0.0 and cfg.xi1 == 0.0 else integrate_forced(
        SystemSpec(cfg.omega, 0.0, 0.0, t0), fam, forcing, Grid.spacing(t0, t_end, dt), FILTER_TOL)
    rec = filters.y2_from_x(rest)
    certs.append(_cert("filter y2 K3 reconstruction", np.max(np.abs(rec.values - fine.y2[::10])),
                       FILTER_ATOL, "y2 = x + integral of K3 x"))
    idx, direct = conditions.w_direct(fine)
    chan = conditions.w_channel(fine)[idx]
    scale = float(np.max(np.abs(direct)))
    gap = float(np.max(np.abs(direct - chan))) / scale if scale > 0 else float(np.max(np.abs(chan)))
    certs.append(_cert("A W direct vs C1/C2 channels (relative)", gap, W_RTOL,
                       "W = C1 U2 + C2 V2"))
    return certs, fine


def resolvent_certifications(cfg: ScenarioConfig) -> tuple[list[Certification], list]:
    """Green's function, resolvent and algebraic certifications on a sparse lattice."""
    fam = parse_family(cfg.family_descriptor)
    w = cfg.omega
    t0 = fam.t0
    certs: list[Certification] = []
    rng = np.random.default_rng(12345)
    ts = rng.uniform(0.0, 50.0, 64)
    ws = np.full_like(ts, w)
    det = np.array([conditions.oscillation_matrix(a, b)[1] for a, b in zip(ws, ts)])
    certs.append(_cert("det M(t) = w(w^2+1)", np.max(np.abs(det - w * (w * w + 1))), 1e-12,
                       "oscillation matrix determinant"))
    c1, c2 = conditions.c_coefficients(w, ts)
    certs.append(_cert("C1^2 + C2^2 = w^2(w^2+1)^2",
                       np.max(np.abs(c1 ** 2 + c2 ** 2 - (w * (w * w + 1)) ** 2)) / (w * (w * w + 1)) ** 2,
                       1e-12, "constant norm of the W coefficients"))
    certs.append(_cert("forcing transform det = w^2(w^2+1)",
                       abs(conditions.forcing_transform_det(w) - w * w * (w * w + 1)), 0.0,
                       "forcing integration-by-parts map"))
    span = 100.0
    s_vals = [t0, t0 + 1.0, t0 + 5.0, t0 + 20.0]
    t_vals = np.linspace(t0, t0 + span, 9)
    rows = resolvent.kernel_sweep(fam, w, s_vals, t_vals)
    diag = [r for r in rows if r.t == r.s]
    certs.append(_cert("K1(t,t) = 1", max(abs(r.K1 - 1.0) for r in diag), 1e-12, "K1 on the diagonal"))
    certs.append(_cert("R_t(t,t) = 1", max(abs(r.R_t - 1.0) for r in diag), 1e-6,
                       "resolvent t-derivative on the diagonal"))
    try:
        ratios = [resolvent.certify_gronwall(fam, w, s, np.linspace(s, s + span, 4001)) for s in s_vals]
        certs.append(_cert("Gronwall bound |G| w exp(-Q/w) <= 1", max(ratios), 1.0 + 1e-9,
                           "Gronwall bound on the Green's function"))
        checks = [resolvent.certify_expansion_error(fam, w, s, s + d)
                  for s in s_vals for d in (1.0, 10.0, 50.0)]
        worst = max(abs(c.actual) - c.bound for c in checks)
        certs.append(_cert("expansion error |E| - bound", worst, 1e-9,
                           "first-order expansion remainder bound"))
    except TailDivergenceError as exc:
        certs.append(Certification(f"Q tail integral ({exc})", False, math.inf, 0.0,
                                   "integrability of the residual potential"))
    certs.append(_cert("Wronskian deviation", resolvent.wronskian_deviation(fam, w, t0), 1e-9,
                       "constant Wronskian of the fundamental pair"))
    ks = resolvent.kernels_at(fam, w, t0 + 10.0, t0 + 5.0)
    certs.append(_cert("K4 analytic vs Richardson difference", abs(ks.K4 - ks.K4_fd), 1e-5,
                       "K4 = w^2 K1 - dK1/ds"))
    for t in (10.0, 100.0, 1000.0):
        if t < t0:
            continue
        wt = resolvent.certify_L1_weights(fam, w, t)
        certs.append(_cert(f"L1 weight int E p at t={t:g}", wt.w1, 2.0, "uniform L1 weight bound"))
        certs.append(_cert(f"L1 weight p(t) int E at t={t:g}", wt.w2, 2.0, "uniform L1 weight bound"))
        certs.append(_cert(f"L1 weight int E|q| at t={t:g}", wt.w3, wt.p_t0, "uniform L1 weight bound"))
    trend = resolvent.kernel_bound_trend(fam, w, min(cfg.horizon, t0 + 100.0 * cfg.period))
    certs.append(_cert("sup |K1|/E growth slope", trend.slope_K1, 0.05, "uniform boundedness of K1"))
    certs.append(_cert("sup |K2|/E growth slope", trend.slope_K2, 0.05, "uniform boundedness of K2"))
    return certs, rows


def run_scenario(cfg: ScenarioConfig, out_dir=None, plots: bool = True) -> tuple[RunReport, Trajectory]:
    """Run the full pipeline; writes CSV/SVG/summary files when ``out_dir`` is given."""
    fam = parse_family(cfg.family_descriptor)
    forcing = parse_forcing(cfg.forcing_descriptor, cfg.omega)
    report = RunReport(cfg)
    hyp = validate_hypotheses(fam, max(cfg.horizon, 1e4))
    bad = hyp.violated
    report.certifications.append(Certification(
        "damping hypotheses" + (f" violated: {', '.join(bad)}" if bad else ""), not bad,
        float(len(bad)), 0.0, "weak damping class of p"))
    spec = SystemSpec(cfg.omega, cfg.xi0, cfg.xi1, fam.t0)
    grid = Grid.per_period(fam.t0, cfg.horizon, cfg.omega, SAMPLES_PER_PERIOD)
    tr = integrate_forced(spec, fam, forcing, grid, cfg.tol)

    fcerts, _ = filter_certifications(cfg)
    report.certifications.extend(fcerts)
    short = Grid.per_period(fam.t0, min(cfg.horizon, fam.t0 + 50.0 * cfg.period), cfg.omega,
                            SAMPLES_PER_PERIOD)
    gap = integrate_undamped_crosscheck(spec, fam, forcing, short, min(max(cfg.tol, 1e-11), TOL_MAX))
    report.certifications.append(_cert("undamped transform cross-check", gap, 1e-6,
                                       "x = rho u removes the damping term"))

    report.verdicts = conditions.statement_verdicts(tr)
    report.contradictions = conditions.contradictions(report.verdicts)
    est = conditions.estimate_limits(tr)
    report.limits = est

    report.fits = [asympt.envelope_fit(tr, w) for w in cfg.windows]
    pres = asympt.preservation_check(tr, est, [cfg.windows[-2] if len(cfg.windows) > 1 else cfg.windows[0],
                                               cfg.windows[-1]])
    report.preservation = pres
    if pres.preserved:
        conv = asympt.converse_check(tr)
        report.converse = conv
        report.certifications.append(Certification(
            "converse: preserved implies converged limits",
            conv.sin_limit_converged and conv.cos_limit_converged, 0.0, 0.0,
            "converse convergence of the weighted y2 integrals"))
        if pres.predicted_c is not None:
            report.certifications.append(_cert("W fit vs predicted (c1, c2) amplitude",
                                               pres.w_amplitude_error, 0.02,
                                               "limiting sinusoid of W"))

    rcerts, rows = resolvent_certifications(cfg)
    report.certifications.extend(rcerts)

    if out_dir is not None:
        write_outputs(report, tr, rows, Path(out_dir), plots)
    return report, tr


def write_outputs(report: RunReport, tr: Trajectory, kernel_rows, out: Path, plots: bool = True) -> None:
    out.mkdir(parents=True, exist_ok=True)
    name = report.config.name
    a = report.artifacts
    a["trajectory"] = str(tr.to_csv(out / "trajectory.csv").name)
    a["verdicts"] = str(conditions.write_verdicts_csv([(name, v) for v in report.verdicts],
                                                      out / "verdicts.csv").name)
    a["fits"] = str(asympt.write_fits_csv([(name, f) for f in report.fits], out / "fits.csv").name)
    a["kernels"] = str(resolvent.write_kernel_csv(kernel_rows, out / "kernels.csv").name)
    with (out / "certifications.csv").open("w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CERT_CSV_HEADER)
        for c in report.certifications:
            wr.writerow(c.row())
    a["certifications"] = "certifications.csv"
    if plots:
        for key, p in emit_plots(report, tr, out).items():
            a[key] = p.name
    a["summary"] = "summary.json"
    (out / "summary.json").write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n",
                                      encoding="utf-8")


def emit_plots(report: RunReport, tr: Trajectory, out_dir) -> dict[str, Path]:
    """Three SVG charts: envelope overlay, normalized y2 integrals, A x vs fitted sinusoid."""
    out = Path(out_dir)
    fit = report.fits[-1] if report.fits else None
    amp = fit.amplitude if fit else 0.0
    rho = np.exp(-tr.logA)
    name = report.config.name
    paths = {
        "plot_envelope": line_chart(out / "envelope.svg", f"{name}: x(t) and envelope",
                                    [("x", tr.times, tr.x), ("+amp/A", tr.times, amp * rho),
                                     ("-amp/A", tr.times, -amp * rho)]),
        "plot_uv": line_chart(out / "u2v2.svg", f"{name}: U2 and V2",
                              [("U2", tr.times, tr.U2), ("V2", tr.times, tr.V2)]),
    }
    if fit is not None:
        lo, hi = fit.window
        m = (tr.times >= lo) & (tr.times <= hi)
        t = tr.times[m]
        model = fit.c_sin * np.sin(tr.omega * t) + fit.c_cos * np.cos(tr.omega * t)
        series = [("A x", t, tr.A[m] * tr.x[m]), ("fit", t, model)]
    else:
        series = [("A x", tr.times, tr.A * tr.x)]
    paths["plot_fit"] = line_chart(out / "fit.svg", f"{name}: A(t) x(t) and fitted sinusoid", series)
    return paths


# --------------------------------------------------------------------------
# command line
# --------------------------------------------------------------------------

def _print_certs(certs: Sequence[Certification], stream) -> None:
    for c in certs:
        mark = "PASS" if c.passed else "FAIL"
        print(f"  [{mark}] {c.name}: value={c.value:.6g} limit={c.limit:.6g} ({c.anchor})", file=stream)


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.horizon is not None:
        overrides["horizon"] = args.horizon
        overrides["windows"] = ()
    if overrides:
        cfg = validate_config(replace(cfg, **overrides))
    out = Path(args.out) if args.out else Path("weakosc-out") / cfg.name
    report, _ = run_scenario(cfg, out)
    print(f"scenario {cfg.name}: output in {out}")
    print("verdicts: " + ", ".join(f"{v.statement}={v.result}" for v in report.verdicts))
    if report.preservation is not None:
        print(f"preservation: {report.preservation.classification}")
    _print_certs(report.certifications, sys.stdout)
    for a, b in report.contradictions:
        print(f"contradiction: ({a}) and ({b}) received opposite verdicts")
    return report.exit_code


def cmd_list(_args) -> int:
    for name, (desc, _) in BUILTIN_SCENARIOS.items():
        print(f"{name:26s} {desc}")
    return EXIT_OK


def cmd_certify(args) -> int:
    cfg = load_config(args.scenario)
    certs, _ = resolvent_certifications(cfg)
    print(f"scenario {cfg.name}: resolvent and algebra certifications")
    _print_certs(certs, sys.stdout)
    return EXIT_OK if all(c.passed for c in certs) else EXIT_CERT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weakosc", description="Weakly damped oscillator experiments.")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a scenario config file (or built-in name)")
    r.add_argument("config")
    r.add_argument("--out", default=None)
    r.add_argument("--tol", type=float, default=None)
    r.add_argument("--horizon", type=float, default=None)
    r.set_defaults(func=cmd_run)
    sub.add_parser("list-scenarios", help="list built-in scenarios").set_defaults(func=cmd_list)
    c = sub.add_parser("certify", help="resolvent and algebra certifications only")
    c.add_argument("scenario")
    c.set_defaults(func=cmd_certify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except WeakOscError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
