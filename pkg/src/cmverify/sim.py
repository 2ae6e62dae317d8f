"""Floating-point simulator for the classical rational Calogero-Moser flow
with Lax power-trace drift diagnostics."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "CollisionError",
    "SimState",
    "SimConfig",
    "Trajectory",
    "rhs",
    "lax_matrix",
    "power_traces",
    "integrate",
    "integrate_batch",
    "drift_report",
    "observed_order",
    "time_reversal_error",
    "reference_config",
    "summary_json",
    "DRIFT_TOL",
    "ORDER_MIN",
    "REVERSAL_TOL",
]

DRIFT_TOL = 1e-8
ORDER_MIN = 3.8
REVERSAL_TOL = 1e-6
# coarse steps keep RK4 error above round-off for the order study
ORDER_DTS = (0.04, 0.02)


class CollisionError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimState:
    t: float
    q: np.ndarray
    p: np.ndarray


@dataclass(frozen=True)
class SimConfig:
    n: int = 3
    k: float = 1.0
    dt: float = 1e-3
    t_end: float = 10.0
    q0: tuple[float, ...] | None = None
    p0: tuple[float, ...] | None = None
    integrator: str = "rk4"
    cadence: int = 10
    collision: float = 1e-8

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (self.dt > 0 and self.t_end > 0):
            raise ValueError("dt and t_end must be positive")
        if self.integrator not in ("rk4", "leapfrog"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.cadence < 1:
            raise ValueError("cadence must be positive")
        for v in (self.q0, self.p0):
            if v is not None and len(v) != self.n:
                raise ValueError("initial state length must equal n")

    def initial_state(self) -> SimState:
        q = np.array(self.q0, dtype=float) if self.q0 is not None else np.linspace(-1.0, 1.0, self.n) * (self.n - 1)
        if self.p0 is not None:
            p = np.array(self.p0, dtype=float)
        else:
            p = 0.3 * np.cos(np.arange(1, self.n + 1, dtype=float))
        return SimState(0.0, q, p)


def reference_config(**overrides) -> SimConfig:
    """The n=3, k=1 run used for regression tolerances."""
    base = SimConfig(n=3, k=1.0, dt=1e-3, t_end=10.0, q0=(-1.0, 0.2, 1.5), p0=(0.4, -0.3, 0.1))
    return replace(base, **overrides)


def _check_separation(q: np.ndarray, threshold: float) -> None:
    d = np.abs(q[:, None] - q[None, :])
    np.fill_diagonal(d, np.inf)
    if d.min() <= threshold:
        i, j = np.unravel_index(np.argmin(d), d.shape)
        raise CollisionError(f"particles {i + 1} and {j + 1} within {threshold:g}")


def rhs(q: np.ndarray, p: np.ndarray, k: float, collision: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """``qdot_i = p_i``, ``pdot_i = sum_{j != i} 2 k^2 / (q_i - q_j)^3``."""
    _check_separation(q, collision)
    d = q[:, None] - q[None, :]
    np.fill_diagonal(d, np.inf)
    force = (2.0 * k * k / d**3).sum(axis=1)
    return p.copy(), force


def lax_matrix(q: np.ndarray, p: np.ndarray, k: float) -> np.ndarray:
    """``L_rs = p_r delta_rs + (1 - delta_rs) i k / (q_r - q_s)``."""
    d = q[:, None] - q[None, :]
    np.fill_diagonal(d, 1.0)
    L = 1j * k / d
    np.fill_diagonal(L, p)
    return L


def power_traces(q: np.ndarray, p: np.ndarray, k: float) -> np.ndarray:
    """``[tr L, tr L^2, ..., tr L^n]`` (real: ``L`` is Hermitian)."""
    L = lax_matrix(q, p, k)
    out = []
    P = np.eye(len(q), dtype=complex)
    for _ in range(len(q)):
        P = P @ L
        out.append(np.trace(P).real)
    return np.array(out)


def _rk4(q, p, k, dt, col):
    k1q, k1p = rhs(q, p, k, col)
    k2q, k2p = rhs(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p, k, col)
    k3q, k3p = rhs(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p, k, col)
    k4q, k4p = rhs(q + dt * k3q, p + dt * k3p, k, col)
    return (
        q + dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q),
        p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
    )


def _leapfrog(q, p, k, dt, col):
    _, f = rhs(q, p, k, col)
    ph = p + 0.5 * dt * f
    qn = q + dt * ph
    _, fn = rhs(qn, ph, k, col)
    return qn, ph + 0.5 * dt * fn


@dataclass
class Trajectory:
    config: SimConfig
    times: list[float] = field(default_factory=list)
    qs: list[np.ndarray] = field(default_factory=list)
    ps: list[np.ndarray] = field(default_factory=list)
    traces: list[np.ndarray] = field(default_factory=list)

    def integrals(self) -> np.ndarray:
        """Rows of ``I_m = tr(L^m) / m``."""
        m = np.arange(1, self.config.n + 1)
        return np.array(self.traces) / m

    def final_state(self) -> SimState:
        return SimState(self.times[-1], self.qs[-1], self.ps[-1])

    def to_csv(self) -> str:
        n = self.config.n
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t"] + [f"q{j}" for j in range(1, n + 1)] + [f"p{j}" for j in range(1, n + 1)] + [f"I{m}" for m in range(1, n + 1)])
        for t, q, p, I in zip(self.times, self.qs, self.ps, self.integrals()):
            w.writerow([repr(float(t))] + [repr(float(x)) for x in (*q, *p, *I)])
        return buf.getvalue()


def integrate(config: SimConfig, state: SimState | None = None) -> Trajectory:
    state = state or config.initial_state()
    step = _rk4 if config.integrator == "rk4" else _leapfrog
    q, p = state.q.astype(float), state.p.astype(float)
    _check_separation(q, config.collision)
    steps = int(round(config.t_end / config.dt))
    traj = Trajectory(config)

    def record(i):
        traj.times.append(state.t + i * config.dt)
        traj.qs.append(q)
        traj.ps.append(p)
        traj.traces.append(power_traces(q, p, config.k))

    record(0)
    for i in range(1, steps + 1):
        q, p = step(q, p, config.k, config.dt, config.collision)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise FloatingPointError(f"non-finite state at step {i}")
        if i % config.cadence == 0 or i == steps:
            record(i)
    return traj


def integrate_batch(configs: list[SimConfig], workers: int | None = None) -> list[Trajectory]:
    """One worker per trajectory; results in config order."""
    if workers == 1 or len(configs) <= 1:
        return [integrate(c) for c in configs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(integrate, configs))


def _relative_drift(series: np.ndarray) -> float:
    ref = series[0]
    dev = float(np.max(np.abs(series - ref)))
    # invariants that start at zero are measured in absolute terms
    return float(dev / abs(ref)) if abs(ref) > 1e-12 else dev


def drift_report(traj: Trajectory, tol: float = DRIFT_TOL) -> dict:
    if not traj.times:
        raise ValueError("empty trajectory")
    n = traj.config.n
    traces = np.array(traj.traces)
    integrals = traj.integrals()
    momentum = np.array([p.sum() for p in traj.ps])
    drifts = {}
    for m in range(n):
        drifts[f"I{m + 1}"] = _relative_drift(integrals[:, m])
        drifts[f"trL{m + 1}"] = _relative_drift(traces[:, m])
    drifts["total_momentum"] = _relative_drift(momentum)
    worst = max(drifts.values())
    return {
        "n": n,
        "k": traj.config.k,
        "dt": traj.config.dt,
        "t_end": traj.config.t_end,
        "integrator": traj.config.integrator,
        "samples": len(traj.times),
        "tolerance": tol,
        "max_relative_drift": drifts,
        "worst": worst,
        "status": "pass" if worst < tol else "fail",
    }


def observed_order(config: SimConfig, dts: tuple[float, float] = ORDER_DTS, invariant: int = 2) -> dict:
    """Observed order from the ``I_invariant`` drift at two step sizes."""
    coarse, fine = (integrate(replace(config, dt=dt, cadence=1)) for dt in dts)
    dc = _relative_drift(coarse.integrals()[:, invariant - 1])
    df = _relative_drift(fine.integrals()[:, invariant - 1])
    ratio = dc / df if df > 0 else math.inf
    return {
        "dts": list(dts),
        "drifts": [dc, df],
        "ratio": float(ratio),
        "order": math.log(ratio, dts[0] / dts[1]) if ratio not in (0, math.inf) else math.inf,
    }


def time_reversal_error(config: SimConfig) -> float:
    """Integrate forward, flip momenta, integrate back; max state deviation."""
    fwd = integrate(config).final_state()
    back = integrate(config, SimState(0.0, fwd.q, -fwd.p)).final_state()
    start = config.initial_state()
    return float(max(np.max(np.abs(back.q - start.q)), np.max(np.abs(-back.p - start.p))))


def summary_json(traj: Trajectory, extra: dict | None = None) -> str:
    doc = drift_report(traj)
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
