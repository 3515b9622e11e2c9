"""
Export Service: writes traces, q_gamma tables and trajectory renderings.
"""

import io
import math
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import Wedge  # noqa: E402

from fov_relay.qgamma import phi_star, qgamma_table  # noqa: E402
from fov_relay.simulator import EventKind, SimTrace, chi_switch_count  # noqa: E402

SNAPSHOTS = 6
NUMBER_FORMAT = "%.15g"


# ==================== Trace CSV ====================

def trace_header(n: int) -> List[str]:
    """Column names of a trace with n agents (9 + 4n columns)."""
    cols = ["t", "p_r_x", "p_r_y"]
    for i in range(1, n + 1):
        cols += [f"a{i}_x", f"a{i}_y", f"a{i}_margin_rad", f"a{i}_in_fov"]
    cols += ["u_r_x", "u_r_y", "chi_n", "d_r", "eta", "a_r"]
    return cols


def trace_table(trace: SimTrace) -> np.ndarray:
    """Trace rows as a float matrix in header order."""
    per_agent = np.concatenate(
        [trace.agents, trace.margins[..., None], trace.in_fov[..., None].astype(float)], axis=2
    ).reshape(len(trace.t), -1)
    return np.column_stack([
        trace.t, trace.p_r, per_agent, trace.u_r,
        trace.chi_n.astype(float), trace.d_r, trace.eta, trace.a_r,
    ])


def trace_summary(trace: SimTrace) -> List[str]:
    """Summary lines written as '#' comments after the rows."""
    s = trace.scenario
    lines = [
        f"scenario: {s.name}",
        f"n: {s.n}",
        f"K_r: {s.gains.K_r!r}",
        f"K_rc: {s.gains.critical!r}",
        f"min_margin_rad: {trace.min_margin!r}",
        f"min_distance: {trace.min_distance!r}",
        f"chi_switches: {chi_switch_count(trace)}",
        f"fov_violations: {len(trace.fov_violations)}",
    ]
    for e in trace.events:
        if e.kind == EventKind.MIN_DISTANCE:
            continue
        agent = "" if e.agent is None else f" agent={e.agent + 1}"
        lines.append(f"event {e.kind.value}: t={e.t!r}{agent} value={e.value!r}")
    return lines


def trace_to_text(trace: SimTrace) -> str:
    """Render a trace as CSV text with a '#' summary footer."""
    buf = io.StringIO()
    footer = "\n".join(f"# {line}" for line in trace_summary(trace))
    np.savetxt(
        buf, trace_table(trace), fmt=NUMBER_FORMAT, delimiter=",",
        header=",".join(trace_header(trace.n)), footer=footer, comments="",
    )
    return buf.getvalue()


def write_trace_csv(trace: SimTrace, path: str) -> Path:
    """Write the trace file; returns its path."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(trace_to_text(trace), encoding="utf-8")
    return out


# ==================== q_gamma table ====================

def qgamma_to_text(gamma: float, samples: int) -> str:
    """(phi, q_gamma(phi)) table plus a '#' line marking the minimum."""
    phi, q = qgamma_table(gamma, samples)
    best = phi_star(gamma)
    buf = io.StringIO()
    np.savetxt(
        buf, np.column_stack([phi, q]), fmt=NUMBER_FORMAT, delimiter=",",
        header="phi_rad,q_gamma",
        footer=f"# minimum: phi_star={best.phi_star!r} q_star={best.q_star!r}",
        comments="",
    )
    return buf.getvalue()


def write_qgamma_table(gamma: float, samples: int, path: str) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(qgamma_to_text(gamma, samples), encoding="utf-8")
    return out


# ==================== SVG rendering ====================

def snapshot_indices(trace: SimTrace) -> List[int]:
    """Row indices of the instants k T / 5, k = 0..5."""
    T = trace.t[-1]
    dt = trace.scenario.dt
    last = len(trace.t) - 1
    return [min(int(round(k * T / (SNAPSHOTS - 1) / dt)), last) for k in range(SNAPSHOTS)]


def render_svg(trace: SimTrace, path: str) -> Path:
    """
    Plot relay and agent paths with the FoV cone at six snapshot instants.

    Each cone is a Wedge with gid 'fov-snapshot-k', so the SVG holds one
    group per snapshot.
    """
    fov = trace.scenario.fov
    heading = math.degrees(math.atan2(fov.bisector[1], fov.bisector[0]))
    half = math.degrees(fov.gamma)

    plt.rcParams["svg.hashsalt"] = "fov-relay"
    fig, ax = plt.subplots(figsize=(8, 8))
    ax.plot(trace.p_r[:, 0], trace.p_r[:, 1], color="black", lw=1.5, label="relay")
    for i in range(trace.n):
        ax.plot(trace.agents[:, i, 0], trace.agents[:, i, 1], lw=1.0, label=f"agent {i + 1}")

    for k, idx in enumerate(snapshot_indices(trace)):
        radius = 1.2 * float(trace.distances[idx].max())
        wedge = Wedge(
            tuple(trace.p_r[idx]), radius, heading - half, heading + half,
            alpha=0.12, color="tab:blue", lw=0.5,
        )
        wedge.set_gid(f"fov-snapshot-{k}")
        ax.add_patch(wedge)
        ax.scatter(trace.agents[idx, :, 0], trace.agents[idx, :, 1], s=8, color="tab:red", zorder=3)

    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(f"{trace.scenario.name}: K_r = {trace.scenario.gains.K_r:.4f}")
    ax.legend(loc="best", fontsize="small")

    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, format="svg", metadata={"Date": None})
    plt.close(fig)
    return out
