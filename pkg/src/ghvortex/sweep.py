"""Angle sweeps: analytic addends, numeric shifts and amplitudes per angle.

Every point is a pure function of ``(config, theta)``, so points are
evaluated concurrently and written back in angle order. Floats are printed
with 15 significant digits; with no shared state and a fixed reduction order
the CSV bytes do not depend on the thread count.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor

from . import barriers as bar
from .config import UNITS_NOTE, ScenarioConfig
from .errors import GHError
from .shifts_analytic import CHANNELS, QUANTITIES, total_shifts
from .shifts_numeric import expectation_shifts, scattered_spectrum

ADDENDS = ("gaussian", "vortex", "correction", "total")
NUMERIC_QUANTITIES = ("Y", "xi", "tau", "kY", "dkX", "eps")

COLUMNS = (
    ["theta_deg", "status", "singular", "r_present", "t_present", "R2", "T2"]
    + [f"ana_{c}_{q}_{a}" for c in CHANNELS for q in QUANTITIES for a in ADDENDS]
    + [f"num_{c}_{q}" for c in CHANNELS for q in NUMERIC_QUANTITIES]
)
NAN = float("nan")


def format_value(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, str):
        return v.replace(",", ";").replace("\n", " ")
    return f"{v + 0.0:.15g}"   # + 0.0 turns -0.0 into 0.0


def evaluate_point(config: ScenarioConfig, theta_deg: float, *, numeric: bool = True) -> dict:
    """One CSV row; errors are recorded in ``status`` instead of being raised."""
    row = dict.fromkeys(COLUMNS, NAN)
    row.update(theta_deg=float(theta_deg), status="ok", singular=False,
               r_present=False, t_present=False)
    tol = config.tolerances
    packet = config.packet.with_theta(math.radians(theta_deg))
    problems = []
    try:
        kin = bar.kinematics(config.barrier, packet.E0, packet.theta,
                             grazing_guard=tol.grazing_guard)
        R, T = bar.amplitudes(config.barrier, kin)
        row["R2"] = abs(R) ** 2
        row["T2"] = abs(T) ** 2 if kin.propagating else 0.0
        ana = total_shifts(config.barrier, packet, band=tol.singular_band,
                           corrections=config.mode.kinematics == "full",
                           floor=tol.amplitude_floor)
    except GHError as exc:
        row["status"] = f"{type(exc).__name__}: {exc}"
        return row

    row["singular"] = ana.singular
    for c in CHANNELS:
        ch = ana.channel(c)
        row[f"{c}_present"] = ch.present
        if not ch.present:
            continue
        for q in QUANTITIES:
            add = ch.get(q)
            for a in ADDENDS:
                row[f"ana_{c}_{q}_{a}"] = getattr(add, a)
        if numeric:
            try:
                spec = scattered_spectrum(config.barrier, packet, c, config.mode, config.grid,
                                          leakage_limit=tol.leakage_limit)
                res = expectation_shifts(spec, norm_floor=tol.norm_floor)
            except GHError as exc:
                problems.append(f"{c}:{type(exc).__name__}")
                continue
            for q in NUMERIC_QUANTITIES:
                row[f"num_{c}_{q}"] = res.get(q)
    if problems:
        row["status"] = ";".join(problems)
    return row


def run_sweep(config: ScenarioConfig, *, threads: int = 1, numeric: bool = True,
              angles_deg=None) -> list[dict]:
    """Rows for every sweep angle (or ``angles_deg``), in angle order."""
    config.validate()
    angles = list(config.sweep.angles_deg() if angles_deg is None else angles_deg)
    if threads <= 1:
        return [evaluate_point(config, a, numeric=numeric) for a in angles]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda a: evaluate_point(config, a, numeric=numeric), angles))


def header_lines(config: ScenarioConfig, title: str = "sweep") -> list[str]:
    return [
        f"# ghvortex {title}",
        f"# {UNITS_NOTE}",
        f"# config_sha256: {config.sha256()}",
        f"# config: {config.canonical_json()}",
    ]


def rows_to_csv(rows, config: ScenarioConfig, *, title: str = "sweep",
                columns=COLUMNS, extra_header=()) -> str:
    out = io.StringIO()
    for line in header_lines(config, title):
        out.write(line + "\n")
    for line in extra_header:
        out.write(f"# {line}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(format_value(row[c]) for c in columns) + "\n")
    return out.getvalue()


def write_csv(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
