"""Self-check suite behind ``ghvortex validate``.

The ``fast`` level runs module invariants and every acceptance check that
needs no real-space synthesis; ``full`` adds the oracle comparisons.
Each check returns measured numbers alongside pass/fail so a failing run
says what went wrong, not only that something did.
"""

from __future__ import annotations

import math
import statistics
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import barriers as bar
from .barriers import Delta, Rect, Step
from .config import ScenarioConfig
from .errors import GHError
from .figures import K0_DELTA, K_DELTA, K_RECT, K_STEP, canonical_config, open_grid
from .grid import QuadratureGrid
from .oracle import (
    default_time, oracle_shifts, outgoing_waves, synthesize_field, two_snapshot_shifts,
)
from .shifts_analytic import (
    reflection_zero_angles, singular_band_default, total_shifts,
)
from .shifts_numeric import ScatterMode, kinematic_map, numeric_shifts
from .sweep import rows_to_csv, run_sweep
from .wavepacket import (
    PacketSpec, ParaxialityWarning, oam_closed_form, oam_quadrature, spectrum_amplitude,
)

LEVELS = ("fast", "full")
SHIFT_QUANTITIES = ("Y", "xi", "kY", "dkX")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass
class ValidationReport:
    level: str
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list:
        return [c.name for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        out = [f"{'PASS' if c.passed else 'FAIL'}  {c.name:<34s} {c.seconds:7.2f}s  {c.detail}"
               for c in self.checks]
        verdict = "PASS" if self.passed else "FAIL (" + ", ".join(self.failures) + ")"
        out.append(f"validation level={self.level}: {verdict}")
        return out


def _packet(k0, k0delta, gamma=0.4, ell=1, theta=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ParaxialityWarning)
        return PacketSpec(k0, k0delta / k0, gamma, ell, theta)


# --------------------------------------------------------------------------
# module invariants
# --------------------------------------------------------------------------

def check_unitarity(n: int = 100, tol: float = 1e-12):
    """Max | |R|^2 + |T|^2 - 1 | over an (E, theta) lattice for each barrier."""
    E = np.linspace(0.05, 5.0, n)[:, None]
    th = np.linspace(0.0, math.radians(89.0), n)[None, :]
    kx = np.sqrt(2.0 * E) * np.cos(th)
    worst = {}
    for b in (Step(1.0), Delta(1.0), Rect(1.0, 2.0)):
        R, T, _, _ = bar.scattering_amplitudes(b, kx)
        err = np.abs(np.abs(R) ** 2 + np.abs(T) ** 2 - 1.0)
        if isinstance(b, Step):
            err = err[kx * kx > 2.0 * b.V0]
        worst[type(b).__name__] = float(err.max())
    ok = all(v < tol for v in worst.values())
    return ok, "max deviation " + ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


def check_log_derivatives(tol: float = 1e-5):
    worst = 0.0
    for b, E in ((Step(1.0), 1.7), (Delta(1.0), 4.5), (Rect(1.0, 5 / K_RECT), 3.0)):
        for deg in (10.0, 25.0, 33.0, 60.0):
            try:
                bundle = bar.log_derivatives(b, E, math.radians(deg), check=True)
            except GHError:
                continue
            worst = max(worst, bundle.fd_max_rel_dev)
    return worst < tol, f"max relative deviation from finite differences {worst:.1e}"


def check_config_roundtrip():
    cfg = canonical_config("6")
    again = ScenarioConfig.from_json(cfg.to_json())
    return again == cfg and again.sha256() == cfg.sha256(), "parse(serialize(c)) == c"


def check_spectrum_norm(tol: float = 1e-10):
    worst = 0.0
    grid = QuadratureGrid()
    for ell in (0, 1, 3):
        for g in (0.4, 1.5):
            p = _packet(3.0, 100.0, g, ell)
            U, V, W = grid.mesh(*p.spectral_widths)
            worst = max(worst, abs(float(np.sum(W * np.abs(spectrum_amplitude(p, U, V)) ** 2)) - 1))
    return worst < tol, f"max |norm - 1| {worst:.1e}"


def check_map_energy():
    """Transmitted map conserves energy to third order in the offsets."""
    b = Step(1.0)
    p = _packet(K_STEP, K0_DELTA, theta=math.radians(20))
    rng = np.random.default_rng(7)
    d = rng.uniform(-1, 1, (2, 64))
    errs = []
    for scale in (1e-2, 5e-3):
        u, v = d * scale
        (xt, yt), _ = kinematic_map(u, v, p, b, kinematics="full")
        kin = bar.kinematics(b, p.E0, p.theta)
        kt2 = (kin.kprime + xt) ** 2 + yt**2
        k2 = (p.k0 + u) ** 2 + v**2
        errs.append(float(np.max(np.abs(0.5 * kt2 - (0.5 * k2 - b.V0)))))
    order = math.log(errs[0] / errs[1]) / math.log(2.0)
    return order > 2.5, f"energy error {errs[0]:.1e} -> {errs[1]:.1e} (order {order:.2f})"


def check_oam(tol: float = 1e-6):
    worst = 0.0
    for ell in (0, 1, 2, 3):
        for g in (0.4, 1.0, 1.5):
            p = _packet(10.0, 100.0, g, ell)
            ref = oam_closed_form(p)
            val = oam_quadrature(p)
            worst = max(worst, abs(val - ref) / max(abs(ref), 1.0) if ell == 0 else abs(val / ref - 1))
    return worst < tol, f"max relative deviation {worst:.1e}"


def check_hermiticity(tol: float = 1e-10):
    """Imaginary parts of the position expectations relative to their real parts."""
    worst = 0.0
    cases = ((Step(1.0), K_STEP, 25.0), (Delta(1.0), K_DELTA, 30.0), (Rect(1.0, 5 / K_RECT), K_RECT, 50.0))
    for b, k0, deg in cases:
        p = _packet(k0, 150.0, 0.6, 1, math.radians(deg))
        for mode in (ScatterMode(), ScatterMode("exact", "full")):
            for c in ("r", "t"):
                res = numeric_shifts(b, p, c, mode)
                for re, im in ((res.Y, res.imag_Y), (res.xi, res.imag_xi)):
                    worst = max(worst, abs(im) / max(abs(re), 1e-3))
    return worst < tol, f"max |Im| / |Re| {worst:.1e}"


# --------------------------------------------------------------------------
# figure agreement
# --------------------------------------------------------------------------

def sweep_agreement(barrier, packet0, mode: ScatterMode, angles_deg, *, channels=("r", "t"),
                    rel=0.02, abs_floor=1e-4):
    """Compare numeric and analytic totals outside singular bands.

    Returns ``(n_compared, failures)``; a failure is a
    ``(theta_deg, channel, quantity, analytic, numeric)`` tuple.
    """
    failures, n = [], 0
    for deg in angles_deg:
        p = packet0.with_theta(math.radians(deg))
        ana = total_shifts(barrier, p, corrections=mode.kinematics == "full")
        for c in channels:
            ch = ana.channel(c)
            if not ch.present or ch.singular:
                continue
            try:
                num = numeric_shifts(barrier, p, c, mode)
            except GHError as exc:
                failures.append((deg, c, type(exc).__name__, float("nan"), float("nan")))
                continue
            for q in SHIFT_QUANTITIES:
                a, x = ch.get(q).total, num.get(q)
                n += 1
                if not abs(a - x) <= max(rel * abs(a), abs_floor):
                    failures.append((deg, c, q, a, x))
    return n, failures


def _describe(n, failures):
    if not failures:
        return f"{n} comparisons within tolerance"
    worst = ", ".join(f"{d:.1f}deg {c}.{q}: {a:.4g} vs {x:.4g}" for d, c, q, a, x in failures[:3])
    return f"{len(failures)}/{n} outside tolerance ({worst})"


def check_figure4():
    cfg = canonical_config("4")
    t0 = time.perf_counter()
    n, fails = sweep_agreement(cfg.barrier, cfg.packet, cfg.mode, open_grid(30))
    dt = time.perf_counter() - t0
    return not fails and dt < 120.0, _describe(n, fails) + f"; sweep {dt:.1f}s"


def check_figure5():
    cfg = canonical_config("5")
    n, fails = sweep_agreement(cfg.barrier, cfg.packet, cfg.mode, open_grid(30))
    return not fails, _describe(n, fails)


def count_resonances(barrier, k, n=20000, threshold=0.999):
    """Number of separate angle intervals in [0, 90) deg with |T|^2 > threshold."""
    th = np.radians(90.0 * np.arange(n) / n)
    _, T, _, _ = bar.scattering_amplitudes(barrier, k * np.cos(th))
    above = np.abs(T) ** 2 > threshold
    return int(np.count_nonzero(above[1:] & ~above[:-1]) + above[0])


def check_figure6():
    cfg = canonical_config("6")
    n, fails = sweep_agreement(cfg.barrier, cfg.packet, cfg.mode, open_grid(30))
    res = count_resonances(cfg.barrier, cfg.packet.k0)
    ok = not fails and res >= 2
    return ok, _describe(n, fails) + f"; {res} transmission resonance(s) with |T|^2 > 0.999"


def check_figure7():
    cfg = canonical_config("7")
    n, fails = sweep_agreement(cfg.barrier, cfg.packet, cfg.mode, open_grid(30), channels=("t",))
    biggest = 0.0
    for deg in open_grid(30):
        p = cfg.packet.with_theta(math.radians(deg))
        try:
            full = numeric_shifts(cfg.barrier, p, "t", ScatterMode("taylor", "full"))
        except GHError:
            continue
        simp = total_shifts(cfg.barrier, p, corrections=False).t
        if simp.singular:
            continue
        for q in SHIFT_QUANTITIES:
            s = simp.get(q).total
            if abs(s) > 1e-12:
                biggest = max(biggest, abs(full.get(q) - s) / abs(s))
    ok = not fails and biggest > 0.05
    return ok, _describe(n, fails) + f"; max Full vs Simplified difference {100 * biggest:.0f}%"


def check_real_coefficient_vortex():
    b = Step(1.0)
    pts = {}
    for ell in (1, -1):
        p = _packet(K_STEP, K0_DELTA, ell=ell, theta=math.radians(20))
        r = total_shifts(b, p).r
        num = numeric_shifts(b, p, "r")
        pts[ell] = (r.Y.gaussian, r.tau.gaussian, r.Y.total, r.tau.total, num.Y, num.tau)
    num0 = numeric_shifts(b, _packet(K_STEP, K0_DELTA, ell=0, theta=math.radians(20)), "r")
    gauss_small = all(abs(v[0]) < 1e-14 and abs(v[1]) < 1e-14 for v in pts.values())
    gauss_small = gauss_small and abs(num0.Y) < 1e-14 and abs(num0.tau) < 1e-14
    flips = all(pts[1][i] != 0 and math.copysign(1, pts[1][i]) == -math.copysign(1, pts[-1][i])
                for i in (2, 3, 4, 5))
    return gauss_small and flips, (
        f"Y^r: analytic {pts[1][2]:+.4g}/{pts[-1][2]:+.4g}, numeric {pts[1][4]:+.4g}/{pts[-1][4]:+.4g} "
        f"for l = +1/-1; gaussian parts {max(abs(pts[1][0]), abs(pts[1][1])):.1e}")


def check_amplification(tol: float = 0.01):
    cases = [
        (Step(1.0), K_STEP, (10.0, 20.0, 30.0)),
        (Delta(1.0), K_DELTA, (15.0, 30.0, 45.0)),
        (Rect(1.0, 5 / K_RECT), K_RECT, (15.0, 45.0, 60.0)),
    ]
    worst = 0.0
    for b, k0, angles in cases:
        for deg in angles:
            p0 = _packet(k0, K0_DELTA, ell=0, theta=math.radians(deg))
            for c in ("r", "t"):
                base = numeric_shifts(b, p0, c)
                for ell in (1, 2, 3):
                    num = numeric_shifts(b, p0.with_ell(ell), c)
                    for q in ("kY", "dkX"):
                        worst = max(worst, abs(num.get(q) / ((1 + ell) * base.get(q)) - 1))
    return worst < tol, f"max |ratio/(1+|l|) - 1| = {worst:.1e}"


def resonance_amplification(barrier, k0, theta_res, offset_frac=0.25):
    """(peak, median, singular flag) of numeric linear shifts near ``theta_res``."""
    p0 = _packet(k0, K0_DELTA)
    band = singular_band_default(p0)
    off = []
    for deg in open_grid(30):
        th = math.radians(deg)
        if abs(th - theta_res) < band:
            continue
        n = numeric_shifts(barrier, p0.with_theta(th), "r")
        off.append(max(abs(n.Y), abs(n.xi)))
    p = p0.with_theta(theta_res - offset_frac * band)
    n = numeric_shifts(barrier, p, "r")
    return max(abs(n.Y), abs(n.xi)), statistics.median(off), total_shifts(barrier, p).singular


def check_resonant_amplification():
    step = Step(1.0)
    rect = Rect(1.0, 5 / K_RECT)
    out, ok = [], True
    for name, b, k0, th in (
        ("step", step, K_STEP, bar.critical_angle(step, K_STEP**2 / 2)),
        ("rect", rect, K_RECT, reflection_zero_angles(rect, K_RECT**2 / 2)[0]),
    ):
        peak, med, sing = resonance_amplification(b, k0, th)
        ok = ok and peak > 10 * med and sing
        out.append(f"{name} {peak / med:.0f}x median (singular={sing})")
    return ok, "; ".join(out)


def check_determinism(threads: int = 4):
    cfg = canonical_config("4")
    one = rows_to_csv(run_sweep(cfg, threads=1), cfg)
    many = rows_to_csv(run_sweep(cfg, threads=threads), cfg)
    return one == many, f"1-thread and {threads}-thread CSV {'identical' if one == many else 'differ'}"


# --------------------------------------------------------------------------
# oracle checks (full level)
# --------------------------------------------------------------------------

ORACLE_K0_DELTA = 30.0


def check_oracle_equivalence(tol: float = 0.05):
    b = Delta(1.0)
    worst = 0.0
    for deg in (15.0, 30.0, 45.0):
        p = _packet(K_DELTA, ORACLE_K0_DELTA, theta=math.radians(deg))
        for c in ("r", "t"):
            num = numeric_shifts(b, p, c, ScatterMode("exact", "full"))
            orc = oracle_shifts(b, p, c)
            for q in SHIFT_QUANTITIES:
                worst = max(worst, abs(num.get(q) - orc[q]) / max(abs(orc[q]), 1e-12))
    return worst < tol, f"max relative deviation engine vs oracle {worst:.1e}"


def check_oracle_invariants():
    b = Step(1.0)
    p = _packet(K_STEP, 150.0, theta=math.radians(20))
    waves = outgoing_waves(b, p, "t")
    t = default_time(p)
    fits = []
    for t1 in (t, 1.5 * t):
        s1 = synthesize_field(b, p, "t", t1, waves=waves)
        s2 = synthesize_field(b, p, "t", 2 * t1, waves=waves)
        fits.append(two_snapshot_shifts(s1, s2))
    drift = max(abs(fits[0][q] - fits[1][q]) / max(abs(fits[0][q]), 1e-12) for q in ("Y", "xi"))
    parseval = abs(s1.norm / float(waves.prob.sum()) - 1)
    nr = outgoing_waves(b, p, "r").prob.sum()
    flux = abs(nr + waves.prob.sum() - 1)
    ok = drift < 0.01 and parseval < 1e-6 and flux < 1e-4
    return ok, (f"time invariance {drift:.1e}, Parseval {parseval:.1e}, "
                f"flux balance {flux:.1e}")


FAST_CHECKS = (
    ("unitarity", check_unitarity),
    ("log-derivative finite differences", check_log_derivatives),
    ("config round-trip", check_config_roundtrip),
    ("spectrum normalisation", check_spectrum_norm),
    ("transmitted map energy", check_map_energy),
    ("OAM quadrature", check_oam),
    ("position operator Hermiticity", check_hermiticity),
    ("figure 4 agreement", check_figure4),
    ("figure 5 agreement", check_figure5),
    ("figure 6 agreement + resonances", check_figure6),
    ("figure 7 corrections", check_figure7),
    ("real-coefficient vortex shifts", check_real_coefficient_vortex),
    ("angular amplification (1+|l|)", check_amplification),
    ("resonant amplification", check_resonant_amplification),
    ("sweep determinism", check_determinism),
)
FULL_CHECKS = FAST_CHECKS + (
    ("oracle equivalence", check_oracle_equivalence),
    ("oracle invariants", check_oracle_invariants),
)


def validate_suite(level: str = "fast", *, progress=None) -> ValidationReport:
    """Run the checks of ``level``; ``progress`` (if given) receives each result."""
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    report = ValidationReport(level)
    for name, fn in FAST_CHECKS if level == "fast" else FULL_CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # noqa: BLE001 - a crashing check is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        res = CheckResult(name, bool(ok), detail, time.perf_counter() - t0)
        report.checks.append(res)
        if progress is not None:
            progress(res)
    return report
