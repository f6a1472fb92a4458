"""Canonical figure datasets (amplitude curves and shift sweeps) with gnuplot scripts.

Amplitude figures (``2a``-``2d``) sample the plane-wave amplitudes on a dense
angle grid. Shift figures (``4``-``7``) hold a dense analytic series followed
by a sparse numeric series, distinguished by the ``series`` column.
"""

from __future__ import annotations

import math
import os
from dataclasses import replace

import numpy as np

from . import barriers as bar
from .barriers import Delta, Rect, Step
from .config import ScenarioConfig, SweepSpec
from .errors import InvalidParameter
from .shifts_analytic import QUANTITIES, total_shifts
from .shifts_numeric import ScatterMode
from .sweep import COLUMNS, format_value, header_lines, run_sweep
from .wavepacket import PacketSpec

FIGURE_IDS = ("2a", "2b", "2c", "2d", "4", "5", "6", "7")
DENSE_POINTS = 1000
SPARSE_POINTS = 30
K0_DELTA = 628.0
GAMMA = 0.4

K_STEP = math.sqrt(3.4)       # E0/V0 = 1.7 with V0 = 1
K_DELTA = 3.0                 # k0/W0 = 3 with W0 = 1
K_RECT = math.sqrt(6.0)       # E0/V0 = 3 with V0 = 1


def open_grid(n: int) -> np.ndarray:
    """Midpoints of ``n`` equal cells covering the open interval (0, 90) degrees."""
    return 90.0 * (np.arange(n) + 0.5) / n


def canonical_barrier(figure_id: str):
    """Barrier and central wavenumber of a canonical figure scenario."""
    if figure_id in ("2a", "4", "7"):
        return Step(1.0), K_STEP
    if figure_id in ("2b", "5"):
        return Delta(1.0), K_DELTA
    if figure_id in ("2c", "2d", "6"):
        return Rect(1.0, 5.0 / K_RECT), K_RECT
    raise InvalidParameter(f"unknown figure id {figure_id!r}; choose from {FIGURE_IDS}")


def canonical_config(figure_id: str) -> ScenarioConfig:
    """Scenario of a shift figure (vortex packet with l = 1, k0 Delta = 628, gamma = 0.4)."""
    if figure_id not in ("4", "5", "6", "7"):
        raise InvalidParameter(f"figure {figure_id!r} has no wavepacket scenario")
    barrier, k0 = canonical_barrier(figure_id)
    kin = "full" if figure_id == "7" else "simplified"
    return ScenarioConfig(
        barrier=barrier,
        packet=PacketSpec(k0, K0_DELTA / k0, GAMMA, 1),
        sweep=SweepSpec(float(open_grid(SPARSE_POINTS)[0]), float(open_grid(SPARSE_POINTS)[-1]),
                        SPARSE_POINTS),
        mode=ScatterMode("taylor", kin),
    )


def _amplitude_rows(figure_id):
    barrier, k = canonical_barrier(figure_id)
    theta = open_grid(DENSE_POINTS)
    kx = k * np.cos(np.radians(theta))
    R, T, _, _ = bar.scattering_amplitudes(barrier, kx)
    if figure_id == "2d":
        cols = ["theta_deg", "R2", "T2"]
        data = [theta, np.abs(R) ** 2, np.abs(T) ** 2]
    else:
        cols = ["theta_deg", "re_R", "im_R", "re_T", "im_T"]
        data = [theta, R.real, R.imag, T.real, T.imag]
    rows = [dict(zip(cols, vals)) for vals in zip(*(map(float, d) for d in data))]
    return cols, rows, barrier, k


def _amplitude_header(figure_id, barrier, k):
    lines = [f"ghvortex figure {figure_id}",
             "plane-wave amplitudes versus incidence angle; natural units hbar = m = 1",
             f"barrier: {bar.barrier_to_dict(barrier)}; k = {k!r}"]
    if isinstance(barrier, Step):
        lines.append(f"critical angle (deg): {math.degrees(bar.critical_angle(barrier, k * k / 2)):.15g}")
    return ["# " + s for s in lines]


def _shift_rows(figure_id, threads):
    config = canonical_config(figure_id)
    dense = run_sweep(config, threads=threads, numeric=False, angles_deg=open_grid(DENSE_POINTS))
    sparse = run_sweep(config, threads=threads, numeric=True)
    cols = ["series"] + list(COLUMNS)
    rows = [dict(r, series="analytic") for r in dense] + [dict(r, series="numeric") for r in sparse]
    if figure_id == "7":
        # Simplified-kinematics analytic totals for comparison with the corrected values
        extra = [f"simplified_t_{q}" for q in QUANTITIES]
        cols += extra
        for r in rows:
            p = config.packet.with_theta(math.radians(r["theta_deg"]))
            simp = total_shifts(config.barrier, p, corrections=False).t
            for q, name in zip(QUANTITIES, extra):
                r[name] = simp.get(q).total if simp.present else float("nan")
    return cols, rows, config


GNUPLOT_AMPLITUDES = """\
# gnuplot script: plane-wave amplitudes of figure {fid}
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set xlabel 'theta (deg)'
set xrange [0:90]
plot {plots}
"""

GNUPLOT_SHIFTS = """\
# gnuplot script: shifts of figure {fid}
# analytic curves are rows 0..{last_dense}; numeric symbols follow
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set xlabel 'theta (deg)'
set xrange [0:90]
set multiplot layout {nrows},4
{panels}
unset multiplot
"""


def _shift_panels(fid, csv_name, channel):
    out = []
    last = DENSE_POINTS - 1
    for q in ("Y", "xi", "kY", "dkX"):
        ana = f"ana_{channel}_{q}_total"
        num = f"num_{channel}_{q}"
        out.append(
            f"set title '<{q}^{channel}>'\n"
            f"plot '{csv_name}' every ::0::{last} using 'theta_deg':'{ana}' with lines, \\\n"
            f"     '{csv_name}' every ::{last + 1} using 'theta_deg':'{num}' with points pt 7"
        )
    return "\n".join(out)


def emit_figure_dataset(figure_id: str, out_dir: str = ".", *, threads: int = 1):
    """Write ``fig_<id>.csv`` and ``fig_<id>.gp`` into ``out_dir``; return both paths."""
    figure_id = str(figure_id)
    if figure_id not in FIGURE_IDS:
        raise InvalidParameter(f"unknown figure id {figure_id!r}; choose from {FIGURE_IDS}")
    os.makedirs(out_dir, exist_ok=True)
    csv_name = f"fig_{figure_id}.csv"
    csv_path = os.path.join(out_dir, csv_name)
    gp_path = os.path.join(out_dir, f"fig_{figure_id}.gp")

    if figure_id.startswith("2"):
        cols, rows, barrier, k = _amplitude_rows(figure_id)
        header = _amplitude_header(figure_id, barrier, k)
        plots = ", ".join(f"'{csv_name}' using 'theta_deg':'{c}' with lines" for c in cols[1:])
        script = GNUPLOT_AMPLITUDES.format(fid=figure_id, plots=plots)
    else:
        cols, rows, config = _shift_rows(figure_id, threads)
        header = header_lines(config, f"figure {figure_id}")
        channels = ("t",) if figure_id == "7" else ("r", "t")
        panels = "\n".join(_shift_panels(figure_id, csv_name, c) for c in channels)
        script = GNUPLOT_SHIFTS.format(fid=figure_id, last_dense=DENSE_POINTS - 1,
                                       nrows=len(channels), panels=panels)

    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(format_value(r[c]) for c in cols) + "\n")
    with open(gp_path, "w", encoding="utf-8") as fh:
        fh.write(script)
    return csv_path, gp_path


def figure_config_with(figure_id: str, **changes) -> ScenarioConfig:
    """Canonical scenario with fields replaced (e.g. ``mode=...``)."""
    return replace(canonical_config(figure_id), **changes)
