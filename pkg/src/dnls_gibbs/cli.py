"""Command-line experiment harness.

Every subcommand resolves its parameters (flags, then ``--config`` JSON on
top), runs, writes byte-stable JSON/CSV artifacts and exits 0 only if all of
its checks pass.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigInvalid, DnlsError, IoFailure

OUTPUT_ENV = "DNLS_GIBBS_OUTPUT"
DEFAULT_OUTPUT = "dnls_gibbs_out"
COMMANDS = ("hierarchy", "conserve", "sample", "wick", "tails", "density", "inequalities")
TAIL_KINDS = ("sobolev", "quadratic", "sup", "linear", "concentration")


# -- byte-stable emission --------------------------------------------------------

def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _plain(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, tuple):
        return [_plain(x) for x in obj]
    return obj


def dumps(obj, indent=0) -> str:
    """JSON with sorted keys and floats at 17 significant digits."""
    obj = _plain(obj)
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent + 1)}" for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(pad + dumps(x, indent + 1) for x in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def csv_text(rows: list, columns: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _cell(v):
    v = _plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format_float(v)
    if v is None:
        return ""
    return v


@dataclass
class ExperimentReport:
    command: str
    config: dict
    checks: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)      # name -> (columns, rows)
    documents: dict = field(default_factory=dict)   # name -> JSON-able object
    files: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def manifest(self) -> dict:
        return {
            "command": self.command,
            # worker count never changes results, so it stays out of the artifacts
            "config": {k: v for k, v in self.config.items() if k != "workers"},
            "version": __version__,
            "checks": dict(self.checks),
            "passed": self.passed,
            "tables": {k: len(rows) for k, (_, rows) in sorted(self.tables.items())},
        }


def emit(report: ExperimentReport, fmt: str, directory) -> list:
    """Write the manifest plus every table (csv) or document (json)."""
    if fmt not in ("csv", "json"):
        raise ValueError("format must be csv or json")
    out = Path(directory)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        payload = {}
        if fmt == "csv":
            for name, (cols, rows) in sorted(report.tables.items()):
                payload[f"{report.command}_{name}.csv"] = csv_text(rows, cols)
        else:
            docs = dict(report.documents)
            for name, (cols, rows) in report.tables.items():
                docs.setdefault(name, rows)
            for name, doc in sorted(docs.items()):
                payload[f"{report.command}_{name}.json"] = dumps(doc) + "\n"
        payload[f"{report.command}_manifest.json"] = dumps(report.manifest()) + "\n"
        for fname, text in sorted(payload.items()):
            path = out / fname
            path.write_text(text, encoding="utf-8", newline="\n")
            written.append(str(path))
    except OSError as exc:
        raise IoFailure(f"cannot write to {out}: {exc}") from exc
    report.files.extend(p for p in written if p not in report.files)
    return written


# -- configuration ------------------------------------------------------------

def _r0_default(beta):
    return math.sqrt(2 / (9 * abs(beta))) if beta else 10.0


DEFAULTS = {
    "hierarchy": {"n_max": 4},
    "conserve": {"N": 32, "beta": 0.5, "t": 1.0, "dt": 1e-4, "amp": 0.1, "every": 100},
    "sample": {"k": 2, "N": 16, "count": 100000},
    "wick": {"k": 2, "M": 4, "N": 8, "samples": 100000, "decay": False, "hyper": False},
    "tails": {"kind": "all", "k": 2, "N": 16, "samples": 100000},
    "density": {"k": 2, "Ns": [8, 16, 32, 64], "samples": 10000, "beta": 1.0, "R0": None},
    "inequalities": {"trials": 10000, "beta": 1.0, "R0": None, "N_max": 16},
}
COMMON = {"seed": 0, "workers": 1, "format": "both"}


def _validate(cfg: dict) -> dict:
    problems = {}
    cmd = cfg.get("command")
    if cmd not in COMMANDS:
        raise ConfigInvalid({"command": f"must be one of {', '.join(COMMANDS)}, got {cmd!r}"})
    known = set(DEFAULTS[cmd]) | set(COMMON) | {"command", "output_dir"}
    for key in cfg:
        if key not in known:
            problems[key] = "unknown parameter"

    def need_int(name, lo):
        v = cfg.get(name)
        if not isinstance(v, int) or isinstance(v, bool) or v < lo:
            problems[name] = f"must be an integer >= {lo}"

    def need_pos(name):
        v = cfg.get(name)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            problems[name] = "must be a positive number"

    need_int("seed", 0)
    need_int("workers", 1)
    if cfg.get("format") not in ("csv", "json", "both"):
        problems["format"] = "must be csv, json or both"
    if cmd == "hierarchy":
        need_int("n_max", 1)
    elif cmd == "conserve":
        need_int("N", 1)
        need_int("every", 1)
        for f in ("dt", "amp"):
            need_pos(f)
        if not isinstance(cfg.get("t"), (int, float)) or cfg["t"] < 0:
            problems["t"] = "must be a nonnegative number"
        if not isinstance(cfg.get("beta"), (int, float)):
            problems["beta"] = "must be a number"
    elif cmd == "sample":
        need_int("k", 2)
        need_int("N", 0)
        need_int("count", 2)
    elif cmd == "wick":
        need_int("k", 2)
        need_int("M", 1)
        need_int("N", 1)
        need_int("samples", 100)
        if "M" not in problems and "N" not in problems and not cfg["M"] <= cfg["N"] <= 64:
            problems["N"] = "need M <= N <= 64"
    elif cmd == "tails":
        need_int("k", 2)
        need_int("N", 1)
        need_int("samples", 1000)
        if cfg.get("kind") not in TAIL_KINDS + ("all",):
            problems["kind"] = f"must be one of {', '.join(TAIL_KINDS + ('all',))}"
    elif cmd == "density":
        need_int("k", 2)
        need_int("samples", 2)
        Ns = cfg.get("Ns")
        if not isinstance(Ns, list) or not Ns or not all(isinstance(n, int) and n >= 1 for n in Ns) \
                or any(b <= a for a, b in zip(Ns, Ns[1:])):
            problems["Ns"] = "must be a nonempty increasing list of positive integers"
        _check_r0(cfg, problems)
    elif cmd == "inequalities":
        need_int("trials", 1)
        need_int("N_max", 1)
        _check_r0(cfg, problems)
    if problems:
        raise ConfigInvalid(problems)
    return cfg


def _check_r0(cfg, problems):
    beta = cfg.get("beta")
    if not isinstance(beta, (int, float)) or isinstance(beta, bool) or beta == 0:
        problems["beta"] = "must be a nonzero number"
        return
    if cfg.get("R0") is None:
        cfg["R0"] = _r0_default(beta)
    r0 = cfg["R0"]
    if not isinstance(r0, (int, float)) or not r0 > 0:
        problems["R0"] = "must be positive"
    elif r0 > _r0_default(beta) * (1 + 1e-12):
        problems["R0"] = f"must not exceed sqrt(2/(9|beta|)) = {_r0_default(beta):.17g}"


def resolve(command, flags: dict, config: dict | None = None) -> dict:
    """Defaults, then flags (non-None), then the config file."""
    if command not in COMMANDS:
        raise ConfigInvalid({"command": f"must be one of {', '.join(COMMANDS)}, got {command!r}"})
    cfg = {"command": command, **COMMON, **DEFAULTS[command]}
    cfg.update({k: v for k, v in flags.items() if v is not None})
    if config:
        if config.get("command", command) != command:
            raise ConfigInvalid({"command": "config file names a different command"})
        cfg.update(config)
    return _validate(cfg)


def output_dir(cfg: dict, flag: str | None = None) -> Path:
    return Path(cfg.get("output_dir") or flag or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)


# -- experiments -----------------------------------------------------------------

def run(config: dict) -> ExperimentReport:
    """Validate and dispatch one experiment."""
    if not isinstance(config, dict) or not config.get("command"):
        raise ConfigInvalid({"command": "missing"})
    cmd = config["command"]
    cfg = resolve(cmd, {}, config)
    return RUNNERS[cmd](cfg)


def _run_hierarchy(cfg):
    from .hierarchy import (
        compare_printed, leading_term_check, generate, grading_problems, load_golden, rung_to_json, template_residual,
    )
    n_max = cfg["n_max"]
    entries = generate(n_max)
    rep = ExperimentReport("hierarchy", cfg)
    rungs = [rung_to_json(e) for e in entries]
    rep.documents["rungs"] = rungs
    for n in range(min(n_max, 4) + 1):
        rep.checks[f"golden_rung_{n}"] = rungs[n] == load_golden(n)
    rows = []
    for n, (same, diff) in sorted(compare_printed(entries).items()):
        rows.append({"n": n, "matches": same, "difference": diff.to_text()})
        if n <= 2:
            rep.checks[f"printed_h{n}"] = same
    rep.tables["printed"] = (["n", "matches", "difference"], rows)
    for e in entries:
        rep.checks[f"gradings_{e.n}"] = not grading_problems(e)
    for n in range(2, n_max + 1):
        rep.checks[f"template_xi_{n}"] = template_residual(entries, n)[2]
    for k in range(2, n_max // 2 + 1):
        rep.checks[f"leading_term_{k}"] = leading_term_check(entries, k)[0]
    return rep


def _run_conserve(cfg):
    from .hierarchy import generate, to_complex
    from .spectral import FourierField, NormSpec, flow_series, integrate_flow, sobolev_norm

    N, beta, t, dt, amp = cfg["N"], float(cfg["beta"]), float(cfg["t"]), float(cfg["dt"]), float(cfg["amp"])
    entries = generate(6)
    hs = [to_complex(entries[2 * m].h) for m in range(4)]
    psi0 = FourierField.from_modes(N, {1: amp, -2: amp / 2})
    rows = []
    final, series = flow_series(psi0, beta, t, dt, hs, every=cfg["every"])
    cols = ["t", "E0", "E1", "E2", "E3"]
    base = series[0][1:]
    drift = [0.0] * 4
    for r in series:
        rows.append(dict(zip(cols, r)))
        for i in range(4):
            drift[i] = max(drift[i], abs(r[i + 1] - base[i]) / abs(base[i]))
    norms = [sobolev_norm(final, NormSpec(s, True)) for s in (1, 2, 3)]
    rows[-1].update({f"Hdot{s}": v for s, v in zip((1, 2, 3), norms)})
    rep = ExperimentReport("conserve", cfg)
    rep.tables["series"] = (cols + ["Hdot1", "Hdot2", "Hdot3"], rows)
    for i in range(4):
        rep.checks[f"drift_E{i}"] = drift[i] < 1e-6
    pw = integrate_flow(FourierField.from_modes(N, {1: amp}), beta, t, dt)
    exact = amp * np.exp(1j * (1 + beta * amp ** 2) * t)
    err = float(np.max(np.abs(pw.coeffs - FourierField.from_modes(N, {1: exact}).coeffs)))
    rep.checks["plane_wave"] = err < 1e-8
    rep.documents["summary"] = {"max_relative_drift": drift, "plane_wave_error": err, "final_Hdot": norms}
    return rep


def _run_sample(cfg):
    from .gibbs import GibbsSpec, mode_std, sample_gamma_k
    from .spectral import modes

    spec = GibbsSpec(cfg["k"], cfg["N"], seed=cfg["seed"])
    batch = sample_gamma_k(spec, cfg["count"], cfg["workers"])
    p = np.abs(batch.coeffs) ** 2
    var = mode_std(spec.k, spec.N) ** 2
    emp = p.mean(axis=0)
    se = p.std(axis=0, ddof=1) / math.sqrt(len(p))
    mean = batch.coeffs.mean(axis=0)
    mse = np.sqrt(var / (2 * len(p)))
    rows = []
    for i, n in enumerate(modes(spec.N)):
        rows.append({"n": int(n), "expected_var": var[i], "empirical_var": emp[i], "stderr": se[i],
                     "mean_re": mean[i].real, "mean_im": mean[i].imag, "mean_stderr": mse[i]})
    rep = ExperimentReport("sample", {**cfg, "spec": spec.as_dict()})
    rep.tables["modes"] = (list(rows[0]), rows)
    rep.checks["variance_3se"] = bool(np.all(np.abs(emp - var) <= 3 * se))
    rep.checks["mean_3se"] = bool(np.all(np.abs(mean.real) <= 3 * mse) and np.all(np.abs(mean.imag) <= 3 * mse))
    return rep


def _run_wick(cfg):
    from .wick import hypercontractivity_check, l2_distance_analytic, l2_distance_mc

    k, M, N, S, seed = cfg["k"], cfg["M"], cfg["N"], cfg["samples"], cfg["seed"]
    w = l2_distance_analytic(k, M, N)
    est, se = l2_distance_mc(k, M, N, S, seed, cfg["workers"])
    cols = ["k", "M", "N", "total", "w1", "w2", "w3", "mc_estimate", "mc_stderr", "samples"]
    rows = [{"k": k, "M": M, "N": N, "total": w.total, "w1": w.w1, "w2": w.w2, "w3": w.w3,
             "mc_estimate": est, "mc_stderr": se, "samples": S}]
    rep = ExperimentReport("wick", cfg)
    rep.checks["w1_zero"] = w.w1 == 0.0
    rep.checks["total_nonnegative"] = w.total >= 0
    rep.checks["mc_within_3se"] = abs(est - w.total) <= 3 * se if M < N else est == 0.0
    if cfg["decay"]:
        scaled = []
        for m in (4, 8, 16, 32):
            d = l2_distance_analytic(k, m, 2 * m)
            scaled.append(m * d.total)
            rows.append({"k": k, "M": m, "N": 2 * m, "total": d.total, "w1": d.w1, "w2": d.w2, "w3": d.w3,
                         "mc_estimate": None, "mc_stderr": None, "samples": 0})
        rep.checks["decay_1_over_M"] = max(scaled) / min(scaled) < 3
    if cfg["hyper"]:
        h = hypercontractivity_check(k, N, max(S, 10_000), seed, cfg["workers"])
        rep.documents["hypercontractivity"] = {"l4": h.l4, "l2": h.l2, "ratio": h.ratio,
                                               "rel_stderr": h.rel_stderr, "bound": h.bound}
        rep.checks["hypercontractivity"] = h.passed
    rep.tables["distance"] = (cols, rows)
    return rep


def default_lambdas(kind, k, N):
    from .tails import expected_net_threshold
    if kind == "sobolev":
        return np.arange(2.0, 17.0, 2.0)
    if kind == "quadratic":
        return np.arange(4.0, 33.0, 4.0)
    if kind == "sup":
        th = expected_net_threshold(k, N)
        return th * np.linspace(1.2, 4.0, 8)
    return np.linspace(0.25, 4.0, 16)


def _run_tails(cfg):
    from . import tails

    k, N, S, seed, wk = cfg["k"], cfg["N"], cfg["samples"], cfg["seed"], cfg["workers"]
    kinds = TAIL_KINDS if cfg["kind"] == "all" else (cfg["kind"],)
    rep = ExperimentReport("tails", {**cfg, "weights": tails.WEIGHT_NOTE})
    rows = []
    params = {}
    for i, kind in enumerate(kinds):
        s = seed + i
        if kind == "concentration":
            c = tails.concentration_dichotomy(k, k - 0.75, k - 0.25, [16, 32, 64, 128], min(S, 10_000), s, workers=wk)
            rep.documents["concentration"] = {
                "Ns": c.Ns, "medians_low": c.medians_low, "medians_high": c.medians_high,
                "s_low": c.s_low, "s_high": c.s_high, "verdict_high": c.verdict_high}
            rep.checks["concentration"] = c.passed
            continue
        lam = default_lambdas(kind, k, N)
        if kind == "sobolev":
            curve = tails.sobolev_tail_study(k, 1.0, N, lam, S, s, wk)
        elif kind == "quadratic":
            curve = tails.quadratic_tail_study(k, N, lam, S, s, workers=wk)
        elif kind == "sup":
            curve = tails.sup_tail_study(k, N, lam, min(S, 20_000), s, wk)
        else:
            curve = tails.linear_tail_study(k, N, tails.derivative_functional(N, 1), lam, S, s, wk)
        rows.extend(curve.rows())
        params[kind] = curve.params
        rep.checks[f"tail_{kind}"] = curve.passed
    rep.documents["parameters"] = params
    cols = ["kind", "k", "N", "lambda", "survival", "stderr", "bound", "fitted_c", "flagged"]
    rep.tables["curves"] = (cols, rows)
    return rep


def _run_density(cfg):
    from .gibbs import GibbsSpec, default_radii, density_convergence_study

    k, beta = cfg["k"], float(cfg["beta"])
    radii = (float(cfg["R0"]),) + default_radii(k, beta)[1:]
    spec = GibbsSpec(k, max(cfg["Ns"]), beta, radii, cfg["seed"])
    r = density_convergence_study(spec, cfg["Ns"], cfg["samples"], workers=cfg["workers"])
    rows = []
    for N, d, se in r.diffs:
        rows.append({"N": N, "mean_abs_dG": d, "p": None, "moment_p": None, "stderr": se})
    for N, p, m, se in r.moments:
        rows.append({"N": N, "mean_abs_dG": None, "p": p, "moment_p": m, "stderr": se})
    rep = ExperimentReport("density", {**cfg, "spec": spec.as_dict()})
    rep.tables["convergence"] = (["N", "mean_abs_dG", "p", "moment_p", "stderr"], rows)
    rep.documents["energy_medians"] = [{"N": N, "m": m, "median_abs_dE": v} for N, m, v in r.energy_medians]
    if len(r.Ns) > 1:
        rep.checks["strictly_decreasing"] = r.strictly_decreasing
        rep.checks["energies_decreasing"] = r.energies_decreasing
    rep.checks["moment_1.5_within_2x"] = r.moment_ratio(1.5) < 2
    return rep


def _run_inequalities(cfg):
    from .hierarchy import generate, to_complex
    from .spectral import check_inequalities, random_trig_poly

    beta, r0 = float(cfg["beta"]), float(cfg["R0"])
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(cfg["seed"])))
    h2 = to_complex(generate(2)[2].h)
    names = ("gagliardo_nirenberg", "cubic_bound", "k1_chain")
    viol = [0, 0, 0]
    worst = [math.inf] * 3
    for _ in range(cfg["trials"]):
        rep_i = check_inequalities(random_trig_poly(rng, cfg["N_max"], r0), beta, h2)
        for j in range(3):
            if rep_i.applicable[j]:
                viol[j] += not rep_i.holds[j]
                worst[j] = min(worst[j], rep_i.margins[j])
    rows = [{"inequality": names[j], "violations": viol[j], "min_margin": worst[j], "trials": cfg["trials"]}
            for j in range(3)]
    rep = ExperimentReport("inequalities", cfg)
    rep.tables["summary"] = (["inequality", "violations", "min_margin", "trials"], rows)
    for j in range(3):
        rep.checks[names[j]] = viol[j] == 0
    return rep


RUNNERS = {
    "hierarchy": _run_hierarchy,
    "conserve": _run_conserve,
    "sample": _run_sample,
    "wick": _run_wick,
    "tails": _run_tails,
    "density": _run_density,
    "inequalities": _run_inequalities,
}


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dnls-gibbs", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="JSON file; its values override flags")
        sp.add_argument("--out", help=f"output directory (else ${OUTPUT_ENV}, else ./{DEFAULT_OUTPUT})")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--format", choices=("csv", "json", "both"))
        return sp

    sp = common(sub.add_parser("hierarchy", help="generate rungs and compare with references"))
    sp.add_argument("--n-max", dest="n_max", type=int)
    sp = common(sub.add_parser("conserve", help="integrate the flow and track E_0..E_3"))
    sp.add_argument("--N", type=int)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--t", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--amp", type=float)
    sp = common(sub.add_parser("sample", help="draw from gamma_k and check mode statistics"))
    sp.add_argument("--k", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--count", type=int)
    sp = common(sub.add_parser("wick", help="L2 distance of f^k_N and f^k_M"))
    sp.add_argument("--k", type=int)
    sp.add_argument("--M", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--decay", action="store_const", const=True)
    sp.add_argument("--hyper", action="store_const", const=True)
    sp = common(sub.add_parser("tails", help="tail and concentration studies"))
    sp.add_argument("--kind", choices=TAIL_KINDS + ("all",))
    sp.add_argument("--k", type=int)
    sp.add_argument("--N", type=int)
    sp.add_argument("--samples", type=int)
    sp = common(sub.add_parser("density", help="convergence of the Gibbs density in N"))
    sp.add_argument("--k", type=int)
    sp.add_argument("--Ns", type=lambda s: [int(x) for x in s.split(",")])
    sp.add_argument("--samples", type=int)
    sp.add_argument("--R0", type=float)
    sp.add_argument("--beta", type=float)
    sp = common(sub.add_parser("inequalities", help="random sweep of the Sobolev-control inequalities"))
    sp.add_argument("--trials", type=int)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--R0", type=float)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if not args.command:
            raise ConfigInvalid({"command": "missing"})
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "out")}
        config = None
        if args.config:
            try:
                config = json.loads(Path(args.config).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigInvalid({"config": str(exc)}) from exc
            if not isinstance(config, dict):
                raise ConfigInvalid({"config": "must be a JSON object"})
        cfg = resolve(args.command, flags, config)
        out = output_dir(cfg, args.out)
        report = RUNNERS[args.command](cfg)
        fmts = ("csv", "json") if cfg["format"] == "both" else (cfg["format"],)
        for fmt in fmts:
            emit(report, fmt, out)
    except ConfigInvalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DnlsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for name, ok in sorted(report.checks.items()):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    print(f"wrote {len(report.files)} files to {out}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
