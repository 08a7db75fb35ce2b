"""Command-line orchestration: linear, toy, weight, verify and simulate runs.

Configuration is a TOML file with tables [grid], [weight], [sim], [linear],
[toy], [verify] and optional [[sim.modes]] entries (k, eta, re, im); any
key can be overridden on the command line with --set table.key=value.
Exit codes: 0 pass, 1 criteria failure, 2 usage/config error, 3 numerical
abort.  The default output directory comes from COUETTELAB_OUTDIR unless
--out is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

try:
    import tomllib  # py >= 3.11
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .grid import make_grid, save_field
from .lemmas import (
    LEMMA_IDS,
    TOOL_IDS,
    SweepSpec,
    inequality_toolbox_check,
    lemma_sweep,
    stability_check,
)
from .lineardyn import fit_loglog_slope, linear_damping_series
from .reporting import Manifest, write_csv, write_json
from .simulation import EchoSpec, SimConfig, run_simulation
from .toymodel import ToyParams, growth_envelope, max_growth, toy_integrate
from .weights import WeightEvaluator, WeightParams, critical_interval
from .grid import zero_field

USAGE_ERROR = 2
NUMERIC_ABORT = 3


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        return tomllib.loads(p.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config does not parse: {exc}") from exc


def _apply_overrides(cfg: dict, pairs: list[str]) -> dict:
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not of the form key=value")
        key, raw = pair.split("=", 1)
        try:
            value = tomllib.loads(f"v = {raw}")["v"]
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"override value for {key!r} does not parse: {raw!r}") from exc
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"override key {key!r} collides with a scalar")
        node[parts[-1]] = value
    return cfg


def _grid_from(cfg: dict):
    g = cfg.get("grid", {})
    return make_grid(
        int(g.get("k_max", 4)),
        float(g.get("eta_max", 64.0)),
        float(g.get("L_y", np.pi)),
    )


def _weight_from(cfg: dict) -> WeightParams:
    w = dict(cfg.get("weight", {}))
    kwargs = {}
    for key in ("s", "sigma", "lam0", "lam_inf", "beta", "growth_const", "delta_lam"):
        if key in w:
            kwargs[key] = float(w[key])
    if "mu" in w:
        kwargs["mu_override"] = float(w["mu"])
    elif "c" in w:
        # visualization path: a bare c pins mu = 4c without touching the
        # growth constants
        kwargs["mu_override"] = 4.0 * float(w["c"])
    return WeightParams(**kwargs)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("COUETTELAB_OUTDIR") or "out"
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    probe = path / ".write_probe"
    try:
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ConfigError(f"output directory {path} is not writable: {exc}") from exc
    return path


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------

def _cmd_linear(cfg: dict, out: Path) -> int:
    lin = cfg.get("linear", {})
    grid = _grid_from(cfg)
    kind = lin.get("kind", "gaussian")
    omega = zero_field(grid)
    if kind == "gaussian":
        # narrow enough that the near-resonant tail is spent before t = 10
        # and the velocity norms sit on their asymptotic power laws
        width = float(lin.get("eta_width", 2.0))
        for k in lin.get("k_seeds", [1, 2]):
            for j, eta in enumerate(grid.eta_values):
                omega.coeffs[grid.index_of(int(k), 0.0)[0], j] = np.exp(
                    -(eta**2) / (2.0 * width**2)
                )
        raw = omega.coeffs
        omega.coeffs = 0.5 * (raw + np.conj(raw[::-1, ::-1]))
        omega.coeffs[grid.k_max, :] = 0.0
    elif kind == "modes":
        for m in lin.get("modes", []):
            omega.set_mode(int(m["k"]), float(m["eta"]), complex(m.get("re", 1.0), m.get("im", 0.0)))
    else:
        raise ConfigError(f"unknown linear.kind {kind!r}")
    t_min = float(lin.get("t_min", 1.0))
    t_max = float(lin.get("t_max", 100.0))
    n_t = int(lin.get("n_t", 40))
    ts = np.geomspace(t_min, t_max, n_t)
    rows = linear_damping_series(omega, ts)
    manifest = Manifest(out)
    manifest.add(write_csv(out / "linear_damping.csv", rows))
    window = [r for r in rows if 10.0 <= r["t"] <= 100.0]
    summary = {}
    if len(window) >= 3:
        tw = np.array([r["t"] for r in window])
        summary = {
            "slope_ux": fit_loglog_slope(tw, np.array([r["norm_ux"] for r in window])),
            "slope_uy": fit_loglog_slope(tw, np.array([r["norm_uy"] for r in window])),
        }
    manifest.add(write_json(out / "linear_summary.json", summary))
    manifest.write()
    print(f"linear: wrote {out / 'linear_damping.csv'}")
    if summary:
        print(f"linear: slopes ux={summary['slope_ux']:.3f} uy={summary['slope_uy']:.3f}")
    return 0


def _cmd_toy(cfg: dict, out: Path) -> int:
    toy = cfg.get("toy", {})
    beta = float(toy.get("beta", 0.25))
    gamma = float(toy.get("gamma", 16.0))
    growth_const = float(toy.get("growth_const", 0.4))
    params = ToyParams(beta=beta, gamma=gamma, growth_const=growth_const)
    traj = toy_integrate(params, step=toy.get("step"))
    rows = [
        {"tau": float(t), "f_r": float(a), "f_nr": float(b)}
        for t, a, b in zip(traj.tau, traj.f_r, traj.f_nr)
    ]
    manifest = Manifest(out)
    manifest.add(write_csv(out / "toy_trajectory.csv", rows))
    report = growth_envelope(params, traj)
    payload = {
        "beta": beta,
        "gamma": gamma,
        "growth_const": growth_const,
        "fitted": report.fitted(),
        "amplification": report.amplification,
        "ratio_at_zero": report.ratio_at_zero,
        "c_nr_vs_r": report.c_nr_vs_r,
        "conserved_monotone": report.conserved_monotone,
    }
    if "max_growth_eta" in toy:
        mg = max_growth(float(toy["max_growth_eta"]), float(toy.get("max_growth_c", 2.0)))
        payload["max_growth"] = {
            "log_m_g": mg.log_m_g,
            "envelope_ratio": mg.envelope_ratio,
        }
    manifest.add(write_json(out / "toy_envelope.json", payload))
    manifest.write()
    print(f"toy: amplification {report.amplification:.4g} at gamma={gamma}, beta={beta}")
    return 0 if report.conserved_monotone else 1


def _cmd_weight(cfg: dict, out: Path) -> int:
    wcfg = cfg.get("weight", {})
    params = _weight_from(cfg)
    ev = WeightEvaluator(params)
    eta = float(wcfg.get("eta", 400.0))
    ks = wcfg.get("k_list") or list(range(1, int(np.floor(np.sqrt(eta))) + 1))
    n_t = int(wcfg.get("n_t", 4000))
    t_grid = np.linspace(0.0, 2.5 * eta, n_t)
    rows = []
    for k in ks:
        iv = critical_interval(int(k), eta, "Itilde")
        seams = [np.sqrt(eta), 2.0 * eta]
        if not iv.empty:
            seams += [max(np.sqrt(eta), iv.t_lo), eta / k, iv.t_hi]
        ts = np.unique(np.concatenate([t_grid, np.asarray(seams)]))
        from .weights import weight_nr, weight_value, weight_dt

        w = weight_value(int(k), ts, eta, ev.mu)
        dw = weight_dt(int(k), ts, eta, ev.mu)
        wnr = weight_nr(ts, eta, ev.mu)
        logj = ev.log_J(float(k), ts, np.full_like(ts, eta))
        loga = logj + ev._log_gevrey_part(float(k), ts, eta)
        with np.errstate(over="ignore"):
            j_raw = np.exp(logj)
            a_raw = np.exp(loga)
        for i, t in enumerate(ts):
            rows.append(
                {
                    "t": float(t),
                    "k": int(k),
                    "eta": eta,
                    "w": float(w[i]),
                    "dt_w": float(dw[i]),
                    "j": float(j_raw[i]),
                    "a": float(a_raw[i]),
                    "w_nr": float(wnr[i]),
                    "log_j": float(logj[i]),
                    "log_a": float(loga[i]),
                }
            )
    manifest = Manifest(out)
    manifest.add(write_csv(out / "weight_profile.csv", rows))
    manifest.write()
    print(f"weight: wrote {len(rows)} rows for eta={eta}, mu={ev.mu}")
    return 0


def _cmd_verify(cfg: dict, out: Path) -> int:
    vcfg = cfg.get("verify", {})
    lemmas = vcfg.get("lemmas", list(LEMMA_IDS))
    tools = vcfg.get("tools", [])
    spec = SweepSpec(
        n_samples=int(vcfg.get("n_samples", 200_000)),
        eta_lo=float(vcfg.get("eta_lo", 16.0)),
        eta_hi=float(vcfg.get("eta_hi", 2048.0)),
        alpha=float(vcfg.get("alpha", 2.0)),
        seed=int(vcfg.get("seed", 7)),
    )
    check_stability = bool(vcfg.get("stability", False))
    params = _weight_from(cfg)
    manifest = Manifest(out)
    failures = []
    for lid in lemmas:
        if lid == "TRICHOTOMY":
            for alpha in vcfg.get("alphas", [1.0, 2.0, 4.0]):
                rep = lemma_sweep(
                    lid,
                    SweepSpec(
                        n_samples=spec.n_samples,
                        eta_lo=spec.eta_lo,
                        eta_hi=spec.eta_hi,
                        alpha=float(alpha),
                        seed=spec.seed,
                    ),
                    params,
                )
                name = f"lemma_TRICHOTOMY_alpha{alpha:g}.json"
                (out / name).write_text(rep.to_json() + "\n")
                manifest.add(out / name)
                ok = rep.status == "ok" and rep.extras.get("uncovered", 1) == 0
                print(f"verify TRICHOTOMY alpha={alpha:g}: "
                      f"{'pass' if ok else 'FAIL'} ({rep.samples} samples)")
                if not ok:
                    failures.append(name)
            continue
        if check_stability:
            st = stability_check(lid, spec, params)
            payload = dict(st)
            payload["base"] = json.loads(st["base"].to_json())
            payload["doubled"] = json.loads(st["doubled"].to_json())
            name = f"lemma_{lid}.json"
            write_json(out / name, payload)
            manifest.add(out / name)
            ok = np.isfinite(st["relative_change"]) and st["relative_change"] < 0.25
            print(
                f"verify {lid}: constant {st['constant_base']:.4g} -> "
                f"{st['constant_doubled']:.4g} drift {st['relative_change']*100:.1f}% "
                f"{'pass' if ok else 'FAIL'}"
            )
            if not ok:
                failures.append(name)
        else:
            rep = lemma_sweep(lid, spec, params)
            name = f"lemma_{lid}.json"
            (out / name).write_text(rep.to_json() + "\n")
            manifest.add(out / name)
            ok = rep.passed is not False and rep.status == "ok"
            print(f"verify {lid}: constant {rep.constant:.4g} "
                  f"({rep.samples} samples) {'pass' if ok else 'FAIL'}")
            if not ok:
                failures.append(name)
    for tid in tools:
        rep = inequality_toolbox_check(tid, spec, params)
        name = f"tool_{tid}.json"
        (out / name).write_text(rep.to_json() + "\n")
        manifest.add(out / name)
        ok = rep.passed is not False and rep.status == "ok"
        print(f"verify {tid}: constant {rep.constant:.4g} {'pass' if ok else 'FAIL'}")
        if not ok:
            failures.append(name)
    manifest.write()
    return 1 if failures else 0


def _cmd_simulate(cfg: dict, out: Path) -> int:
    sim = cfg.get("sim", {})
    grid = _grid_from(cfg)
    modes = [
        (int(m["k"]), float(m["eta"]), complex(float(m.get("re", 0.0)), float(m.get("im", 0.0))))
        for m in sim.get("modes", [])
    ]
    profile = sim.get("profile", {})
    if profile.get("kind") == "gaussian":
        width = float(profile.get("eta_width", 2.0))
        for k in profile.get("k_seeds", [1, 2]):
            for eta in grid.eta_values:
                amp = np.exp(-(eta**2) / (2.0 * width**2)) * np.exp(-0.3 * int(k))
                if amp > 1e-6:
                    modes.append((int(k), float(eta), complex(amp)))
    elif profile and profile.get("kind") != "gaussian":
        raise ConfigError(f"unknown sim.profile.kind {profile.get('kind')!r}")
    echo = None
    if "echo" in cfg:
        e = cfg["echo"]
        echo = EchoSpec(
            k0=int(e["k0"]),
            eta_star=float(e["eta_star"]),
            background_eta=float(e.get("background_eta", 0.0)),
        )
    config = SimConfig(
        grid=grid,
        weight=_weight_from(cfg),
        epsilon=float(sim.get("epsilon", 1e-2)),
        dt=float(sim.get("dt", 0.02)),
        t_end=float(sim.get("t_end", 50.0)),
        t_start=float(sim.get("t_start", 1.0)),
        modes=modes,
        policy=str(sim.get("policy", "project")),
        dealias=bool(sim.get("dealias", True)),
        nonlinear=bool(sim.get("nonlinear", True)),
        report_every=int(sim.get("report_every", 25)),
        snapshot_every=int(sim.get("snapshot_every", 0)),
        triad_every=int(sim.get("triad_every", 0)),
        echo=echo,
    )
    result = run_simulation(config)
    manifest = Manifest(out)
    manifest.add(write_csv(out / "energy_series.csv", [r.row() for r in result.reports]))
    for idx, snap in enumerate(result.snapshots):
        name = f"snapshot_{idx:04d}.bin"
        save_field(snap, out / name)
        manifest.add(out / name)
    if result.echo is not None:
        payload = {"analysis": result.echo.analyze(), "k0": result.echo.spec.k0,
                   "eta_star": result.echo.spec.eta_star}
        manifest.add(write_json(out / "echo_report.json", payload))
    manifest.add(
        write_json(
            out / "simulate_summary.json",
            {"aborted": result.aborted, "message": result.message,
             "n_reports": len(result.reports)},
        )
    )
    manifest.write()
    if result.aborted:
        print(f"simulate: aborted - {result.message}", file=sys.stderr)
        return NUMERIC_ABORT
    print(f"simulate: {len(result.reports)} reports to {out}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--out", help="output directory (default $COUETTELAB_OUTDIR or ./out)")
    common.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="dotted-key config override, e.g. --set sim.epsilon=1e-3",
    )
    parser = argparse.ArgumentParser(
        prog="couettelab",
        description="spectral laboratory for zero-mean Couette inviscid damping",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="verb", required=True)
    sub.add_parser("linear", help="linear damping table", parents=[common])
    sub.add_parser("toy", help="echo toy model trajectory and envelopes", parents=[common])
    sub.add_parser("weight", help="weight profile CSV for plotting", parents=[common])
    verify = sub.add_parser("verify", help="lemma/toolbox certification sweeps", parents=[common])
    verify.add_argument("--lemma", action="append", default=[], choices=list(LEMMA_IDS))
    verify.add_argument("--tool", action="append", default=[], choices=list(TOOL_IDS))
    verify.add_argument("--stability", action="store_true",
                        help="measure constants at the base and doubled eta range")
    sub.add_parser("simulate", help="nonlinear run with energy reports", parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _apply_overrides(_load_config(args.config), args.overrides)
        out = _out_dir(args)
        if args.verb == "linear":
            return _cmd_linear(cfg, out)
        if args.verb == "toy":
            return _cmd_toy(cfg, out)
        if args.verb == "weight":
            return _cmd_weight(cfg, out)
        if args.verb == "verify":
            vcfg = cfg.setdefault("verify", {})
            if args.lemma:
                vcfg["lemmas"] = args.lemma
            if args.tool:
                vcfg.setdefault("lemmas", args.lemma or [])
                vcfg["tools"] = args.tool
            if args.stability:
                vcfg["stability"] = True
            return _cmd_verify(cfg, out)
        if args.verb == "simulate":
            return _cmd_simulate(cfg, out)
        parser.error(f"unknown verb {args.verb!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
