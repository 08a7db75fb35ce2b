"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s` to see every line.  The
certification of the two slope-exchange estimates is expected to fail: the
forward exponential weight w_NR has log-slope ~ mu sqrt(eta) (t - sqrt(eta))
/ (2 eta - sqrt(eta))^2, which is not comparable to 1/(1 + |t - eta/k|)
uniformly in eta, so their empirical constants drift with the sampled range
(details in that test's docstring).  Every other criterion passes at its
stated tolerance.
"""

import time

import numpy as np

from couettelab.cli import main as cli_main
from couettelab.grid import (
    SpectralField,
    make_grid,
    random_real_field,
    zero_field,
)
from couettelab.lemmas import SweepSpec, lemma_sweep, stability_check
from couettelab.lineardyn import fit_loglog_slope, linear_damping_series
from couettelab.simulation import (
    EchoSpec,
    SimConfig,
    biot_savart_moving,
    energy_report,
    nonlinear_rhs,
    run_simulation,
    step,
    triad_diagnostic,
)
from couettelab.spectral import (
    apply_multiplier,
    convolve_direct,
    convolve_fields,
    gevrey_norm,
)
from couettelab.toymodel import ToyParams, growth_envelope, max_growth, toy_integrate
from couettelab.weights import (
    WeightEvaluator,
    WeightParams,
    weight_nr,
    weight_value,
)


def verdict(num: str, ok: bool, detail: str) -> bool:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def gaussian_data(grid, k_seeds=(1, 2), width=2.0):
    om = zero_field(grid)
    for k in k_seeds:
        i = k + grid.k_max
        om.coeffs[i, :] = np.exp(-grid.eta_values**2 / (2.0 * width**2))
    om.coeffs = 0.5 * (om.coeffs + np.conj(om.coeffs[::-1, ::-1]))
    om.coeffs[grid.k_max, :] = 0.0
    return om


def test_criterion_01_linear_damping_slopes():
    start = time.monotonic()
    grid = make_grid(4, 64.0, np.pi)
    om = gaussian_data(grid)
    ts = np.geomspace(10.0, 100.0, 30)
    rows = linear_damping_series(om, ts)
    sx = fit_loglog_slope(ts, np.array([r["norm_ux"] for r in rows]))
    sy = fit_loglog_slope(ts, np.array([r["norm_uy"] for r in rows]))
    elapsed = time.monotonic() - start
    ok = abs(sx + 1.0) <= 0.1 and abs(sy + 2.0) <= 0.1 and elapsed <= 10.0
    assert verdict(
        "01", ok, f"linear slopes ux={sx:.3f} (target -1+-0.1), uy={sy:.3f} "
        f"(target -2+-0.1), {elapsed:.2f}s"
    )


def test_criterion_02_weight_exactness():
    mu = 4.0
    worst_seam = 0.0
    worst_dip = 0.0
    exact = True
    for eta in (4.0, 16.0, 36.0, 100.0, 400.0, 2048.0):
        rt = np.sqrt(eta)
        for k in range(1, int(np.floor(rt)) + 1):
            # flat branches, bit for bit
            exact &= weight_value(k, 0.45 * rt, eta, mu) == np.exp(-mu * rt)
            exact &= weight_value(k, 2.0 * eta * 1.001, eta, mu) == 1.0
            center, half = eta / k, eta / k**2
            seams = [rt, max(rt, center - half), center, center + half, 2.0 * eta]
            for p in seams:
                lo = weight_value(k, np.nextafter(p, -np.inf), eta, mu)
                hi = weight_value(k, np.nextafter(p, np.inf), eta, mu)
                worst_seam = max(worst_seam, abs(lo - hi) / max(lo, hi))
            dip = weight_nr(center, eta, mu) / weight_value(k, center, eta, mu)
            worst_dip = max(worst_dip, abs(dip * k**2 / eta - 1.0))
    ok = exact and worst_seam <= 1e-12 and worst_dip <= 1e-10
    assert verdict(
        "02", ok, f"weight branches exact={exact}, worst seam jump={worst_seam:.2e} "
        f"(<=1e-12), worst dip error={worst_dip:.2e} (<=1e-10)"
    )


def test_criterion_03_figure_reproduction(tmp_path):
    rc = cli_main([
        "weight", "--out", str(tmp_path),
        "--set", "weight.c=1.2", "--set", "weight.mu=4.0",
        "--set", "weight.eta=400.0", "--set", "weight.n_t=4000",
    ])
    assert rc == 0
    lines = (tmp_path / "weight_profile.csv").read_text().splitlines()
    cols = lines[0].split(",")
    it, ik, iw, inr = cols.index("t"), cols.index("k"), cols.index("w"), cols.index("w_nr")
    rows = [(float(r[it]), int(r[ik]), float(r[iw]), float(r[inr]))
            for r in (ln.split(",") for ln in lines[1:])]
    eta = 400.0
    worst = 0.0
    peaks_ok = True
    ks = sorted({k for _, k, _, _ in rows})
    for k in ks:
        sub = [(t, w, wnr) for t, kk, w, wnr in rows if kk == k]
        at_center = [w / wnr for t, w, wnr in sub if abs(t - eta / k) < 1e-9]
        worst = max(worst, abs(at_center[0] * eta / k**2 - 1.0))
        # the dip bottom (the 1/w peak) sits at the critical time
        center, half = eta / k, eta / k**2
        window = [(t, w / wnr) for t, w, wnr in sub
                  if max(np.sqrt(eta), center - half) <= t <= center + half]
        t_min = min(window, key=lambda p: p[1])[0]
        peaks_ok &= abs(t_min - center) <= half / 50.0
    envelope = [(t, wnr) for t, _, _, wnr in rows if np.sqrt(eta) <= t <= 2 * eta]
    envelope.sort()
    monotone = all(b[1] >= a[1] - 1e-15 for a, b in zip(envelope, envelope[1:]))
    ok = len(ks) == 20 and worst <= 1e-8 and peaks_ok and monotone
    assert verdict(
        "03", ok, f"figure profile: k sweep of {len(ks)}, dip-depth error={worst:.2e} "
        f"(<=1e-8), per-interval peaks at critical times={peaks_ok}, "
        f"monotone envelope={monotone}"
    )


def test_criterion_04_toy_envelopes():
    start = time.monotonic()
    worst = 0.0
    for beta in (0.1, 0.25):
        fits = {}
        for gamma in (4.0, 16.0, 64.0):
            p = ToyParams(beta=beta, gamma=gamma, growth_const=0.4)
            rep = growth_envelope(p, toy_integrate(p))
            for name, val in rep.fitted().items():
                fits.setdefault(name, []).append(val)
        for vals in fits.values():
            worst = max(worst, max(vals) / min(vals))
    elapsed = time.monotonic() - start
    ok = worst < 2.0 and elapsed <= 5.0
    assert verdict(
        "04", ok, f"toy envelope constants drift x{worst:.3f} across gamma "
        f"(< 2 required), {elapsed:.2f}s"
    )


def test_criterion_05_maximal_growth():
    ok = True
    details = []
    for c in (1.6, 2.0, 4.0):
        etas = np.geomspace(1.0, 1e4, 600)
        ratios = np.array([max_growth(e, c).envelope_ratio for e in etas])
        sup_all = ratios.max()
        sup_head = ratios[etas <= 100.0].max()
        ok &= np.isfinite(sup_all) and sup_all == sup_head  # attained early: uniform
        details.append(f"c={c}: sup={sup_all:.4f}")
    ok &= np.isfinite(max_growth(1e6, 4.0).log_m_g)
    assert verdict(
        "05", ok, "stirling envelope bounded on [1, 1e4] (sup attained below "
        "eta=100); log form finite at eta=1e6; " + "; ".join(details)
    )


def test_criterion_06_trichotomy_coverage():
    ok = True
    details = []
    for alpha in (1.0, 2.0, 4.0):
        rep = lemma_sweep(
            "TRICHOTOMY", SweepSpec(n_samples=110_000, alpha=alpha, seed=7)
        )
        ok &= rep.samples >= 100_000 and rep.extras["uncovered"] == 0
        details.append(f"alpha={alpha:g}: {rep.samples} tuples, "
                       f"{rep.extras['uncovered']} uncovered")
    assert verdict("06", ok, "trichotomy " + "; ".join(details))


CERTIFIABLE = ("WNR_RATIO", "J_GENERAL", "J_IMPROVED", "J_LXI", "J_CAP", "HALF_DERIVATIVE")
SLOPE_LEMMAS = ("DTW_RATIO", "DTW_EXCHANGE")


def test_criterion_06_stability_certifiable_lemmas():
    spec = SweepSpec(n_samples=150_000, eta_lo=16.0, eta_hi=2048.0, seed=7)
    ok = True
    details = []
    for lid in CERTIFIABLE:
        st = stability_check(lid, spec)
        drift = st["relative_change"]
        ok &= np.isfinite(drift) and drift < 0.25
        details.append(f"{lid}={drift * 100:.1f}%")
    assert verdict("06", ok, "constant drift under eta doubling (<25%): " + ", ".join(details))


def test_criterion_06_stability_slope_lemmas():
    """Expected failure: the dt w / w comparability estimates do not hold
    uniformly for the forward exponential weight.

    The non-resonant log-slope is 2 mu sqrt(eta) (t - sqrt(eta)) /
    (2 eta - sqrt(eta))^2, so the product with (1 + |t - eta/k|) spans
    [~mu/eta, ~mu sqrt(eta)] over the resonant ladder and its envelope grows
    like sqrt(eta_max) under range doubling.  The frequency-exchange variant
    inherits the same defect and in addition its sup statistic is noise
    dominated (dt w has genuine zeros on the dip's left flank), so its
    measured drift swings with the seed.  Both estimates do hold for the
    backward-constructed reference weight, which is out of scope here.
    """
    spec = SweepSpec(n_samples=150_000, eta_lo=16.0, eta_hi=2048.0, seed=7)
    ok = True
    details = []
    for lid in SLOPE_LEMMAS:
        st = stability_check(lid, spec)
        drift = st["relative_change"]
        ok &= np.isfinite(drift) and drift < 0.25
        details.append(f"{lid}={drift * 100:.1f}%")
    assert verdict(
        "06", ok,
        "slope-lemma constant drift (<25% required): " + ", ".join(details)
        + "  [known defect of the forward weight approximation]",
    )


def test_criterion_07_elliptic_estimate():
    """Certified constant = the gain over unit single-mode fields (the operator
    norm of the weighted inversion), which the resonant modes (1, eta ~ t)
    realize; dense random fields spread their norm over the lattice and sit
    strictly below it, so they provide the finiteness check."""
    p = WeightParams()
    lam = 0.3
    ts = (1.0, 2.0, 5.0, 12.0, 25.0, 50.0)

    def operator_norm(grid):
        worst = 0.0
        kg, eg = grid.k_grid.astype(float), grid.eta_grid
        for t in ts:
            with np.errstate(divide="ignore", invalid="ignore"):
                gain = (
                    np.sqrt(kg**2 + eg**2)
                    * (1.0 + t * t)
                    / ((kg**2 + (eg - kg * t) ** 2) * grid.bracket_sq**1.5)
                )
            worst = max(worst, float(np.max(np.where(kg != 0, gain, 0.0))))
        return worst

    rng = np.random.default_rng(21)
    sups = []
    field_sups = []
    for grid in (make_grid(3, 64.0, np.pi), make_grid(6, 128.0, np.pi)):
        sups.append(operator_norm(grid))
        worst = 0.0
        for _ in range(100):
            f = random_real_field(grid, rng)
            f.coeffs *= np.exp(-lam * grid.abs_l1**p.s) * grid.bracket_sq ** (-p.sigma / 2)
            nf = gevrey_norm(f, lam, p.sigma, p.s)
            for t in ts:
                u_z, u_y, _ = biot_savart_moving(f, t)
                nu = np.hypot(
                    gevrey_norm(u_z, lam, p.sigma - 3.0, p.s),
                    gevrey_norm(u_y, lam, p.sigma - 3.0, p.s),
                )
                worst = max(worst, nu * (1.0 + t * t) / nf)
        field_sups.append(worst)
    drift = abs(sups[1] - sups[0]) / sups[0]
    fields_below = all(fs <= s * (1.0 + 1e-9) for fs, s in zip(field_sups, sups))
    ok = np.isfinite(sups[1]) and drift < 0.25 and fields_below
    assert verdict(
        "07", ok, f"elliptic gain: operator norm {sups[0]:.4f} -> {sups[1]:.4f} "
        f"under grid refinement (drift {drift * 100:.2f}%); 100-random-field "
        f"sups {field_sups[0]:.4f}, {field_sups[1]:.4f} finite and below it"
    )


def test_criterion_08_spectral_oracle_equivalence():
    rng = np.random.default_rng(8)
    worst = 0.0
    checked = []
    for grid in (
        make_grid(2, 4.0, np.pi),
        make_grid(4, 16.0, np.pi),
        make_grid(8, 32.0, np.pi / 2),
        make_grid(10, 50.0, np.pi),
    ):
        assert grid.n_points <= 10_000
        f = random_real_field(grid, rng, amplitude=0.1)
        h = random_real_field(grid, rng, amplitude=0.1)
        fast = convolve_fields(f, h).coeffs
        slow = convolve_direct(f, h).coeffs
        err_conv = np.max(np.abs(fast - slow)) / max(1.0, np.max(np.abs(slow)))
        f.time_tag = 2.0
        rhs, _ = nonlinear_rhs(f, 2.0, policy="monitor")
        u_z, u_y, _ = biot_savart_moving(f, 2.0)
        dz = SpectralField(grid, 1j * grid.k_grid * f.coeffs)
        dy = SpectralField(grid, 1j * grid.eta_grid * f.coeffs)
        ref = -(convolve_direct(u_z, dz).coeffs + convolve_direct(u_y, dy).coeffs) / (2 * np.pi)
        err_rhs = np.max(np.abs(rhs.coeffs - ref)) / max(1.0, np.max(np.abs(ref)))
        worst = max(worst, err_conv, err_rhs)
        checked.append(grid.n_points)
    ok = worst <= 1e-12
    assert verdict(
        "08", ok, f"convolution/rhs vs direct sums on lattices {checked}: "
        f"max error {worst:.2e} (<=1e-12)"
    )


def test_criterion_09_energy_identity():
    grid = make_grid(3, 4.0, 2 * np.pi)
    rng = np.random.default_rng(5)
    f = random_real_field(grid, rng, amplitude=1e-3)
    f.time_tag = 5.05  # seam-free window for every populated mode
    ev = WeightEvaluator(WeightParams())
    dt = 1e-3
    states = [f]
    for _ in range(200):
        states.append(step(states[-1], dt))
    energies = [energy_report(s, ev).energy for s in states]

    def rhs_total(state):
        rep = energy_report(state, ev)
        _, _, A, _ = ev.lattice_arrays(grid, state.time_tag)
        r, _ = nonlinear_rhs(state, state.time_tag)
        af = apply_multiplier(state, A)
        ar = apply_multiplier(r, A)
        adv = float(np.real(np.sum(np.conj(af.coeffs) * ar.coeffs)) * grid.d_eta)
        return -rep.ck_lambda - rep.ck_w + adv

    worst_fd = 0.0
    for i in range(10, 190, 10):
        fd = (energies[i + 1] - energies[i - 1]) / (2 * dt)
        an = rhs_total(states[i])
        worst_fd = max(worst_fd, abs(fd - an) / max(abs(an), abs(fd)))

    worst_triad = 0.0
    for i in (0, 100, 200):
        worst_triad = max(worst_triad, triad_diagnostic(states[i], ev).sum_residual)

    ok = worst_fd < 1e-4 and worst_triad < 1e-9
    assert verdict(
        "09", ok, f"energy identity fd-vs-analytic rel err {worst_fd:.2e} (<=1e-4), "
        f"triad sum residual {worst_triad:.2e} (<=1e-9) over a 200-step run"
    )


def test_criterion_10_bootstrap_threshold():
    grid = make_grid(4, 8.0, np.pi)
    modes = []
    for k in (1, 2, 3):
        for eta in grid.eta_values:
            amp = np.exp(-eta**2 / 8.0) * np.exp(-0.3 * k)
            if amp > 1e-6:
                modes.append((k, float(eta), amp))
    threshold = None
    rows = []
    for eps in (0.025, 0.0125, 0.00625):
        cfg = SimConfig(grid=grid, epsilon=eps, modes=modes, dt=0.02,
                        t_start=1.0, t_end=50.0, report_every=25)
        res = run_simulation(cfg)
        E = np.array([r.energy for r in res.reports])
        ts = np.array([r.t for r in res.reports])
        ux = np.array([r.norm_ux for r in res.reports])
        uy = np.array([r.norm_uy for r in res.reports])
        ratio = float(E.max() / E[0])
        bx = float((ux * np.sqrt(1.0 + ts**2)).max())
        by = float((uy * (1.0 + ts**2)).max())
        ck = np.array([r.ck_lambda + r.ck_w for r in res.reports])
        budget = float(np.trapezoid(ck, ts) / E[0])
        bounded = np.isfinite(bx) and np.isfinite(by) and not res.aborted
        rows.append((eps, ratio, budget))
        if ratio <= 4.0 and bounded and threshold is None:
            threshold = eps
    ok = threshold is not None
    assert verdict(
        "10", ok, f"bootstrap: measured threshold eps={threshold} "
        f"(E(t) <= 4 E(1) and damping products bounded on [1, 50]); "
        + "; ".join(f"eps={e:g}: maxE/E1={r:.2f}, CK budget={b:.1f}xE1"
                    for e, r, b in rows)
    )


def test_criterion_11_echo_detection():
    grid = make_grid(4, 48.0, 2 * np.pi)
    eta_star, k0 = 36.0, 2
    cfg = SimConfig(
        grid=grid,
        epsilon=1.0,
        modes=[(k0, eta_star, 0.01), (1, 0.5, 0.2)],
        dt=0.05,
        t_start=1.0,
        t_end=48.0,
        report_every=100,
        echo=EchoSpec(k0=k0, eta_star=eta_star, background_eta=0.5),
    )
    res = run_simulation(cfg)
    assert not res.aborted
    ana = res.echo.analyze()[k0 - 1]
    orr_target = eta_star / (k0 - 1)
    prediction = eta_star / (k0 - 1) ** 2
    t_ok = abs(ana["t_velocity_peak"] - orr_target) <= 0.2 * orr_target
    amp_ok = prediction / 4.0 <= ana["velocity_gain"] <= prediction * 4.0
    # the burst is a genuine transient: the daughter's speed collapses again
    series = res.echo.u_amp[k0 - 1]
    transient = series.max() > 5.0 * series[-1]
    ok = t_ok and amp_ok and transient
    assert verdict(
        "11", ok,
        f"echo: daughter velocity burst at t={ana['t_velocity_peak']:.2f} "
        f"(critical time {orr_target:.1f} +-20%), gain {ana['velocity_gain']:.1f} "
        f"vs prediction {prediction:.1f} (within x4); vorticity column filled "
        f"near the pump time (kick plateau {ana['vorticity_plateau']:.2e})",
    )
