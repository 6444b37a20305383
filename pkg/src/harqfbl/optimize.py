"""Grid search of retransmission coefficients under a PER constraint.

For each candidate coefficient vector the full outcome distribution is
evaluated (fixed-SNR or fading path, as dictated by the channel), and the
feasible point with the highest throughput wins.  Ties break toward the
shorter retransmission, which also means less queueing delay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import DomainError
from .fbl import DEFAULT_KERNEL, KernelOptions, db_to_linear, linear_to_db
from .fading import DEFAULT_PATH_BUDGET, FadingOutcomeQuery, outcomes_fading
from .fsmc import FsmcModel
from .outcomes import HarqConfig, outcomes_awgn, throughput

COARSE_TAU_GRID = tuple(round(0.1 * i, 2) for i in range(1, 11))
FINE_TAU_GRID = tuple(round(0.01 * i, 2) for i in range(1, 101))


@dataclass(frozen=True)
class FrontierPoint:
    taus: tuple[float, ...]
    per: float
    throughput: float
    feasible: bool


@dataclass(frozen=True)
class OptimizationProblem:
    """Throughput maximisation over tau subject to a residual-PER ceiling.

    channel is either a linear SNR (fixed-SNR evaluation) or an FsmcModel.
    constraint "ceiling" keeps points with PER <= per_ceiling; "floor"
    inverts the inequality, matching the alternative reading of the
    constraint direction.
    """

    cfg_base: HarqConfig
    channel: float | FsmcModel
    per_ceiling: float
    tau_grid: tuple[float, ...] = COARSE_TAU_GRID
    constraint: str = "ceiling"
    kernel: KernelOptions = DEFAULT_KERNEL
    path_budget: int = DEFAULT_PATH_BUDGET

    def __post_init__(self) -> None:
        if not 0.0 < self.per_ceiling <= 1.0:
            raise DomainError(f"PER threshold must lie in (0, 1], got {self.per_ceiling}")
        if not self.tau_grid:
            raise DomainError("tau grid must be nonempty")
        last = 0.0
        for t in self.tau_grid:
            if not 0.0 < t <= 1.0 or t <= last:
                raise DomainError("tau grid must be strictly increasing within (0, 1]")
            last = t
        if self.constraint not in ("ceiling", "floor"):
            raise DomainError(f"unknown constraint direction {self.constraint!r}")

    def evaluate(self, taus: tuple[float, ...]) -> tuple[float, float]:
        """(residual PER, throughput) of the base config with these taus."""
        cfg = self.cfg_base.with_taus(taus)
        if isinstance(self.channel, FsmcModel):
            outcome = outcomes_fading(
                FadingOutcomeQuery(cfg, self.channel, self.kernel, self.path_budget)
            )
        else:
            outcome = outcomes_awgn(cfg, self.channel, self.kernel)
        return outcome.p_e, throughput(cfg, outcome)

    def is_feasible(self, per: float) -> bool:
        if self.constraint == "ceiling":
            return per <= self.per_ceiling
        return per >= self.per_ceiling


@dataclass(frozen=True)
class OptimizationReport:
    """Winner plus the full (tau, PER, throughput) frontier.

    When no grid point satisfies the constraint, feasible is False and the
    reported point is the best-effort minimum-PER one.
    """

    tau_hat: tuple[float, ...]
    achieved_per: float
    achieved_throughput: float
    feasible: bool
    frontier: tuple[FrontierPoint, ...]
    snr_db: float | None = field(default=None, compare=False)


def _report(problem: OptimizationProblem, candidates: Sequence[tuple[float, ...]],
            tie_key) -> OptimizationReport:
    frontier = []
    for taus in candidates:
        per, tp = problem.evaluate(taus)
        frontier.append(FrontierPoint(taus, per, tp, problem.is_feasible(per)))
    feasible_pts = [p for p in frontier if p.feasible]
    if feasible_pts:
        best = max(feasible_pts, key=lambda p: (p.throughput, tie_key(p.taus)))
        return OptimizationReport(best.taus, best.per, best.throughput, True, tuple(frontier))
    best = min(frontier, key=lambda p: (p.per, -tie_key(p.taus)))
    return OptimizationReport(best.taus, best.per, best.throughput, False, tuple(frontier))


def optimize_tau1(problem: OptimizationProblem) -> OptimizationReport:
    """Best single retransmission coefficient for an m = 2 configuration."""
    if problem.cfg_base.m != 2:
        raise DomainError(f"optimize_tau1 needs m = 2, got m = {problem.cfg_base.m}")
    candidates = [(1.0, t) for t in problem.tau_grid]
    return _report(problem, candidates, lambda taus: -taus[1])


def optimize_tau12(problem: OptimizationProblem) -> OptimizationReport:
    """Best (tau1, tau2) with tau2 <= tau1 for an m = 3 configuration.

    Ties break lexicographically toward the smaller tau1 + tau2, then the
    smaller tau1.
    """
    if problem.cfg_base.m != 3:
        raise DomainError(f"optimize_tau12 needs m = 3, got m = {problem.cfg_base.m}")
    candidates = [
        (1.0, t1, t2)
        for t1 in problem.tau_grid
        for t2 in problem.tau_grid
        if t2 <= t1
    ]
    return _report(problem, candidates, lambda taus: (-(taus[1] + taus[2]), -taus[1]))


def sweep(problem: OptimizationProblem, snrs_db: Sequence[float]) -> list[OptimizationReport]:
    """One optimisation per SNR; the fading partition is reused across SNRs."""
    if len(snrs_db) == 0:
        raise DomainError("SNR list must be nonempty")
    optimise = optimize_tau1 if problem.cfg_base.m == 2 else optimize_tau12
    reports = []
    for snr_db in snrs_db:
        if isinstance(problem.channel, FsmcModel):
            channel: float | FsmcModel = problem.channel.with_avg_snr(db_to_linear(snr_db))
        else:
            channel = db_to_linear(snr_db)
        point = OptimizationProblem(
            cfg_base=problem.cfg_base,
            channel=channel,
            per_ceiling=problem.per_ceiling,
            tau_grid=problem.tau_grid,
            constraint=problem.constraint,
            kernel=problem.kernel,
            path_budget=problem.path_budget,
        )
        report = optimise(point)
        reports.append(
            OptimizationReport(
                report.tau_hat,
                report.achieved_per,
                report.achieved_throughput,
                report.feasible,
                report.frontier,
                snr_db=snr_db,
            )
        )
    return reports


def reports_csv_lines(reports: Sequence[OptimizationReport]) -> Iterable[str]:
    yield "snr_db,tau1,per,throughput,feasible"
    for r in reports:
        snr = "" if r.snr_db is None else f"{r.snr_db:.12g}"
        yield (
            f"{snr},{r.tau_hat[1]:.12g},{r.achieved_per:.12g},"
            f"{r.achieved_throughput:.12g},{str(r.feasible).lower()}"
        )


def reports_to_json(reports: Sequence[OptimizationReport]) -> str:
    payload = []
    for r in reports:
        payload.append(
            {
                "snr_db": r.snr_db,
                "tau_hat": list(r.tau_hat),
                "per": r.achieved_per,
                "throughput": r.achieved_throughput,
                "feasible": r.feasible,
                "frontier": [
                    {
                        "taus": list(p.taus),
                        "per": p.per,
                        "throughput": p.throughput,
                        "feasible": p.feasible,
                    }
                    for p in r.frontier
                ],
            }
        )
    return json.dumps(payload, indent=2)


def channel_label(channel: float | FsmcModel) -> str:
    if isinstance(channel, FsmcModel):
        return f"fsmc(L={channel.n_states}, fdtb={channel.f_d * channel.t_tb:.6g})"
    return f"awgn({linear_to_db(channel):.6g} dB)"
