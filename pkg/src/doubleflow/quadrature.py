"""Structure-ignorant numerical oracles.

Fixed-step classical RK4 on flat real coordinate vectors, composite Simpson
quadrature, and conserved-quantity drift reporting.  Nothing in here knows
about groups or brackets; that ignorance is what makes the oracle independent
of the closed-form flows it checks.
"""

import math

import numpy as np

__all__ = [
    "Trajectory",
    "DriftReport",
    "NonFiniteStateError",
    "rk4_integrate",
    "simpson_rule",
    "simpson_integral",
    "drift_report",
]


class NonFiniteStateError(RuntimeError):
    """RK4 state left the finite floats; carries the time of first failure."""

    def __init__(self, time):
        super().__init__(f"non-finite state at t = {time!r}")
        self.time = float(time)


class Trajectory:
    """Sampled solution: strictly increasing times, one flat state row each."""

    __slots__ = ("times", "states")

    def __init__(self, times, states):
        times = np.asarray(times, dtype=float)
        states = np.asarray(states, dtype=float)
        if times.ndim != 1 or states.ndim != 2 or len(times) != len(states):
            raise ValueError("times and states must be aligned 1d/2d arrays")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        self.times = times
        self.states = states

    def __len__(self):
        return len(self.times)

    def __repr__(self):
        return f"Trajectory({len(self.times)} samples, dim {self.states.shape[1]})"


class DriftReport:
    """Per-invariant (initial value, max |f(y_t) - f(y_0)|, time of the max)."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        self.entries = dict(entries)
        for name, (_, d, _) in self.entries.items():
            if d < 0:
                raise ValueError(f"negative drift for {name!r}")

    def drift(self, name) -> float:
        return self.entries[name][1]

    def max_drift(self) -> float:
        return max((v[1] for v in self.entries.values()), default=0.0)

    def __repr__(self):
        body = ", ".join(f"{k}: {v[1]:.3e}" for k, v in self.entries.items())
        return f"DriftReport({body})"


def _rk4_step(field, t, y, h):
    k1 = np.asarray(field(y), dtype=float)
    k2 = np.asarray(field(y + 0.5 * h * k1), dtype=float)
    k3 = np.asarray(field(y + 0.5 * h * k2), dtype=float)
    k4 = np.asarray(field(y + h * k3), dtype=float)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_integrate(field, y0, t0, t1, h) -> Trajectory:
    """Classical fixed-step RK4; the final partial step lands exactly on t1.

    field maps a flat real state to its rate and must not depend on time.
    Raises NonFiniteStateError the first time a state stops being finite.
    """
    if not (h > 0):
        raise ValueError("h must be positive")
    if not (t1 > t0):
        raise ValueError("t1 must exceed t0")
    y = np.array(y0, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise NonFiniteStateError(t0)
    span = t1 - t0
    n_full = int(math.floor(span / h + 1e-12))
    times = [t0]
    states = [y.copy()]
    for k in range(n_full):
        y = _rk4_step(field, t0 + k * h, y, h)
        t = t0 + (k + 1) * h
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(t)
        times.append(t)
        states.append(y.copy())
    rest = t1 - (t0 + n_full * h)
    if rest > 1e-12 * max(h, abs(t1)):
        y = _rk4_step(field, t0 + n_full * h, y, rest)
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(t1)
        times.append(t1)
        states.append(y.copy())
    else:
        times[-1] = t1
    return Trajectory(np.array(times), np.array(states))


def simpson_rule(t0, t1, n):
    """Composite-Simpson nodes and weights on [t0, t1] with n (even) panels."""
    n = int(n)
    if n < 2 or n % 2:
        raise ValueError("Simpson rule needs an even panel count >= 2")
    nodes = np.linspace(t0, t1, n + 1)
    h = (t1 - t0) / n
    weights = np.full(n + 1, 2.0)
    weights[1::2] = 4.0
    weights[0] = weights[-1] = 1.0
    return nodes, weights * (h / 3.0)


def simpson_integral(f, t0, t1, n):
    """Composite Simpson integral of a scalar-, vector- or matrix-valued f."""
    nodes, weights = simpson_rule(t0, t1, n)
    total = None
    for s, w in zip(nodes, weights):
        v = w * np.asarray(f(s))
        total = v if total is None else total + v
    if total.ndim == 0:
        return total[()]
    return total


def drift_report(traj: Trajectory, invariants) -> DriftReport:
    """Max absolute drift of each named invariant along the trajectory."""
    entries = {}
    for name, f in invariants.items():
        f0 = float(f(traj.states[0]))
        worst, at = 0.0, traj.times[0]
        for t, y in zip(traj.times, traj.states):
            d = abs(float(f(y)) - f0)
            if d > worst:
                worst, at = d, t
        entries[name] = (f0, worst, float(at))
    return DriftReport(entries)
