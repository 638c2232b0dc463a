"""Monte Carlo protocol: average both measures over many draws per spin size.

For every spin gridpoint and every schedule exponent n the perturbation
bound is x_max = y_max = 1 / (2 S**n); each trial draws a fresh coefficient
set and evaluates the closed forms.  Reproducibility contract: the stream
for trial t at gridpoint two_s is seeded by splitmix64-mixing the tuple
(master_seed, two_s, t) and feeds numpy's PCG64, so a given configuration
produces bitwise-identical results no matter how many workers run it.  The
trial streams are shared across the exponents n on purpose: every n sees the
same underlying draws scaled by its own bound, which makes the comparison
between schedules exact rather than statistical.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import closedform, oracle
from .model import EntanglementReport, SpinDims, sample_coefficients, x_max_schedule

__all__ = [
    "DEFAULT_TWO_S_GRID",
    "ORACLE_CROSSCHECK_TOL",
    "SweepConfig",
    "SweepPoint",
    "SweepError",
    "trial_seed",
    "trial_rng",
    "summarize",
    "run_sweep",
]

DEFAULT_TWO_S_GRID = (2, 4, 10, 20, 40, 100, 200, 400, 1000)
DEFAULT_C = (0j, 0j, complex(1.0 / np.sqrt(2.0)), complex(1.0 / np.sqrt(2.0)))

ORACLE_CROSSCHECK_TOL = 1e-10

_MASK64 = (1 << 64) - 1


def _mix64(z: int) -> int:
    """splitmix64 output function (Steele, Lea & Flood's published constants)."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def trial_seed(master_seed: int, two_s: int, trial: int) -> int:
    """64-bit seed for one trial; part of the output contract.

    Folds the tuple left to right with h = mix64(h ^ mix64(part)), starting
    from h = 0.  Inputs are reduced modulo 2**64 first.
    """
    h = 0
    for part in (master_seed, two_s, trial):
        h = _mix64(h ^ _mix64(int(part) & _MASK64))
    return h


def trial_rng(master_seed: int, two_s: int, trial: int) -> np.random.Generator:
    """Independent PCG64 stream for one trial."""
    return np.random.Generator(np.random.PCG64(trial_seed(master_seed, two_s, trial)))


class SweepError(RuntimeError):
    """A trial failed; carries the (two_s, n, trial) coordinates for diagnosis."""

    def __init__(self, two_s: int, n: int, trial: int, message: str):
        super().__init__(f"sweep failed at two_s={two_s}, n={n}, trial={trial}: {message}")
        self.two_s = two_s
        self.n = n
        self.trial = trial
        self.detail = message

    def __reduce__(self):
        return (SweepError, (self.two_s, self.n, self.trial, self.detail))


@dataclass(frozen=True)
class SweepConfig:
    """Protocol parameters for one sweep."""

    two_s_values: tuple[int, ...] = DEFAULT_TWO_S_GRID
    n_values: tuple[int, ...] = (1, 2, 3)
    trials: int = 200
    c: tuple[complex, ...] = DEFAULT_C
    master_seed: int = 0
    complex_mode: bool = False
    oracle_crosscheck_max_dim: int = 64

    def __post_init__(self):
        if not self.two_s_values:
            raise ValueError("two_s_values must be nonempty")
        if any(v < 1 for v in self.two_s_values):
            raise ValueError("every two_s value must be >= 1")
        if list(self.two_s_values) != sorted(set(self.two_s_values)):
            raise ValueError("two_s_values must be strictly ascending")
        if not self.n_values or not set(self.n_values) <= {1, 2, 3}:
            raise ValueError("n_values must be a nonempty subset of {1, 2, 3}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if len(self.c) != 4:
            raise ValueError("c must have length 4")
        object.__setattr__(self, "two_s_values", tuple(int(v) for v in self.two_s_values))
        object.__setattr__(self, "n_values", tuple(sorted(set(int(v) for v in self.n_values))))
        object.__setattr__(self, "c", tuple(complex(v) for v in self.c))


@dataclass(frozen=True)
class SweepPoint:
    """Aggregated statistics of one (two_s, n) gridpoint."""

    two_s: int
    n: int
    trials: int
    mean_c: float
    std_c: float
    mean_tau: float
    std_tau: float
    mean_gap: float
    std_gap: float
    mean_abs_gap: float
    min_monogamy_slack: float

    def __post_init__(self):
        if not 0.0 <= self.mean_c <= 1.0 or not 0.0 <= self.mean_tau <= 1.0:
            raise ValueError("mean concurrence and one-tangle must lie in [0, 1]")
        if min(self.std_c, self.std_tau, self.std_gap) < 0.0:
            raise ValueError("standard deviations must be nonnegative")
        if self.min_monogamy_slack < -1e-12:
            raise ValueError(f"monogamy violated: min slack {self.min_monogamy_slack!r}")


def _mean_std(values: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(values)) + 0.0
    if values.size < 2 or np.ptp(values) == 0.0:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1))


def summarize(reports) -> dict:
    """Mean and sample standard deviation (n-1 denominator) of a batch of reports."""
    reports = list(reports)
    if not reports:
        raise ValueError("summarize requires at least one report")
    c = np.array([r.concurrence for r in reports])
    tau = np.array([r.one_tangle for r in reports])
    gap = np.array([r.gap for r in reports])
    mean_c, std_c = _mean_std(c)
    mean_tau, std_tau = _mean_std(tau)
    mean_gap, std_gap = _mean_std(gap)
    return {
        "mean_c": mean_c,
        "std_c": std_c,
        "mean_tau": mean_tau,
        "std_tau": std_tau,
        "mean_gap": mean_gap,
        "std_gap": std_gap,
        "mean_abs_gap": float(np.mean(np.abs(gap))) + 0.0,
        "min_monogamy_slack": min(r.monogamy_slack for r in reports),
    }


def _crosscheck_trial(cs, report: EntanglementReport, two_s: int, n: int, trial: int) -> None:
    state = oracle.assemble_state(cs)
    c_oracle = oracle.wootters_concurrence(oracle.reduce(state, "D"))
    tau_oracle = oracle.one_tangle(oracle.reduce(state, "Q1"))
    dc = abs(report.concurrence - c_oracle)
    dtau = abs(report.one_tangle - tau_oracle)
    if dc > ORACLE_CROSSCHECK_TOL or dtau > ORACLE_CROSSCHECK_TOL:
        raise SweepError(
            two_s, n, trial,
            f"closed form disagrees with oracle (dC={dc:.3e}, dtau={dtau:.3e})",
        )


def _compute_point(config: SweepConfig, n: int, two_s: int) -> SweepPoint:
    x_max = x_max_schedule(two_s, n)
    dims = SpinDims(two_s)
    crosscheck = dims.m_a * dims.m_b <= config.oracle_crosscheck_max_dim
    reports = []
    for trial in range(1, config.trials + 1):
        try:
            rng = trial_rng(config.master_seed, two_s, trial)
            cs = sample_coefficients(dims, x_max, x_max, config.c, rng, config.complex_mode)
            report = closedform.evaluate(cs)
            if crosscheck:
                _crosscheck_trial(cs, report, two_s, n, trial)
        except SweepError:
            raise
        except Exception as exc:
            raise SweepError(two_s, n, trial, str(exc)) from exc
        reports.append(report)
    return SweepPoint(two_s=two_s, n=n, trials=config.trials, **summarize(reports))


def _point_task(task: tuple[SweepConfig, int, int]) -> SweepPoint:
    return _compute_point(*task)


def run_sweep(config: SweepConfig, workers: int | None = None) -> list[SweepPoint]:
    """Evaluate every (n, two_s) gridpoint; n-major, two_s-minor output order.

    ``workers`` bounds the number of worker processes (default: all cores).
    The worker count cannot change the results: every trial owns a stream
    derived only from (master_seed, two_s, trial), and points are aggregated
    in a fixed order.  Any failed trial aborts the sweep with a SweepError
    naming its coordinates; trials are never silently skipped.
    """
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError("workers must be >= 1")
    tasks = [(config, n, two_s) for n in config.n_values for two_s in config.two_s_values]
    if workers == 1 or len(tasks) == 1:
        return [_point_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(_point_task, tasks))
