"""Time-block finite-state Markov model of a Rayleigh fading envelope.

The unit-power Rayleigh envelope (density 2x exp(-x^2)) is partitioned into
L amplitude states [eta_l, eta_{l+1}) with eta_1 = 0 and eta_{L+1} = inf.
Sampling the channel every t_tb seconds under Doppler f_d yields a
birth-death Markov chain whose off-diagonal transition probabilities follow
from the level crossing rate:

    P(l -> l+1) = N(eta_{l+1}) * t_tb / q_l
    P(l -> l-1) = N(eta_l)     * t_tb / q_l

with N(eta) = sqrt(2*pi) * eta * f_d * exp(-eta^2) and q_l the state's
marginal probability.  The expected sojourn time of a state is
q_l / (N(eta_l) + N(eta_{l+1})); for the chain to be well defined, t_tb
must not exceed any sojourn time.

Two threshold constructions are provided:

  - build_equal_duration: solves the thresholds so every state (including
    the last) has exactly the same expected sojourn time; the packets-per-
    state ratio c = sojourn / t_tb is an output.
  - build_fixed_sojourn: takes c as an input, places thresholds left to
    right so each interior state's sojourn equals c * t_tb, and leaves the
    final state as the tail remainder (its sojourn is whatever is left).
    This is the construction behind the bundled fading presets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

from .errors import ConstructionError, DomainError
from .fbl import db_to_linear, linear_to_db

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def level_crossing_rate(eta: float, f_d: float) -> float:
    """Rate (per second) at which the envelope crosses level eta downward."""
    if eta < 0.0:
        raise DomainError(f"threshold must be nonnegative, got {eta}")
    if f_d <= 0.0:
        raise DomainError(f"Doppler frequency must be positive, got {f_d}")
    if math.isinf(eta):
        return 0.0
    return _SQRT_2PI * eta * f_d * math.exp(-eta * eta)


def marginal_probability(eta_lo: float, eta_hi: float) -> float:
    """P(eta_lo <= |h| < eta_hi) for the unit-power Rayleigh envelope."""
    if not 0.0 <= eta_lo < eta_hi:
        raise DomainError(f"need 0 <= eta_lo < eta_hi, got ({eta_lo}, {eta_hi})")
    hi = 0.0 if math.isinf(eta_hi) else math.exp(-eta_hi * eta_hi)
    return math.exp(-eta_lo * eta_lo) - hi


def state_snr(eta_lo: float, eta_hi: float, avg_snr: float) -> float:
    """Mean linear SNR conditioned on the envelope lying in [eta_lo, eta_hi).

    avg_snr is the unconditional mean SNR (P_t / (B*N_0)); the conditional
    mean follows from integrating x^2 against the Rayleigh density over
    the interval.
    """
    if avg_snr <= 0.0:
        raise DomainError(f"average SNR must be positive, got {avg_snr}")

    def antiderivative(x: float) -> float:
        return 0.0 if math.isinf(x) else math.exp(-x * x) * (x * x + 1.0)

    q = marginal_probability(eta_lo, eta_hi)
    return avg_snr * (antiderivative(eta_lo) - antiderivative(eta_hi)) / q


@dataclass(frozen=True)
class DopplerSpec:
    """Doppler frequency and time-block duration of the sampled channel."""

    f_d: float
    t_tb: float

    def __post_init__(self) -> None:
        if self.f_d <= 0.0:
            raise DomainError(f"Doppler frequency must be positive, got {self.f_d}")
        if self.t_tb <= 0.0:
            raise DomainError(f"time-block duration must be positive, got {self.t_tb}")

    @property
    def normalized(self) -> float:
        return self.f_d * self.t_tb


def _sojourn_norm(eta_lo: float, eta_hi: float) -> float:
    """Expected sojourn time of a state, normalised to f_d = 1 Hz."""
    den = level_crossing_rate(eta_lo, 1.0) + level_crossing_rate(eta_hi, 1.0)
    return marginal_probability(eta_lo, eta_hi) / den


def _solve_upper_threshold(eta_lo: float, target: float) -> float | None:
    """Upper threshold making the state's normalised sojourn equal target.

    The sojourn is strictly increasing in the upper threshold; for
    eta_lo > 0 it is bounded by the tail sojourn 1/(sqrt(2*pi)*eta_lo), so
    the solve returns None when the target is unreachable.
    """
    if eta_lo > 0.0 and target >= 1.0 / (_SQRT_2PI * eta_lo) * (1.0 - 1e-14):
        return None
    lo = eta_lo
    hi = max(eta_lo * 2.0, eta_lo + 1.0, 1.0)
    while _sojourn_norm(eta_lo, hi) < target:
        hi = eta_lo + 2.0 * (hi - eta_lo)
        if hi > 1e9:
            return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= eta_lo or mid >= hi or hi - lo < 1e-16 * max(1.0, hi):
            break
        if _sojourn_norm(eta_lo, mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _interior_thresholds(n_states_solved: int, target: float) -> list[float] | None:
    """Left-to-right thresholds giving n_states_solved states of equal sojourn."""
    etas = [0.0]
    for _ in range(n_states_solved):
        nxt = _solve_upper_threshold(etas[-1], target)
        if nxt is None:
            return None
        etas.append(nxt)
    return etas


@dataclass(frozen=True)
class FsmcModel:
    """Immutable fading-state model.

    thresholds has L+1 entries, the last being +inf; transitions is an
    L x L row-stochastic tridiagonal matrix; state_snrs are the per-state
    conditional mean SNRs (linear); c is the per-state sojourn time in
    units of t_tb (for fixed-sojourn builds this is the interior-state
    value, the tail state may differ).
    """

    thresholds: tuple[float, ...]
    q: tuple[float, ...]
    transitions: tuple[tuple[float, ...], ...]
    state_snrs: tuple[float, ...]
    avg_snr: float
    f_d: float
    t_tb: float
    c: float

    @property
    def n_states(self) -> int:
        return len(self.q)

    def sojourn_times(self) -> tuple[float, ...]:
        """Expected time (seconds) the envelope dwells in each state."""
        out = []
        for i in range(self.n_states):
            den = level_crossing_rate(self.thresholds[i], self.f_d) + level_crossing_rate(
                self.thresholds[i + 1], self.f_d
            )
            out.append(self.q[i] / den)
        return tuple(out)

    def tb_bound_slacks(self) -> tuple[float, ...]:
        """Per-state slack sojourn_time - t_tb; all must be nonnegative."""
        return tuple(t - self.t_tb for t in self.sojourn_times())

    def with_avg_snr(self, avg_snr: float) -> "FsmcModel":
        """Same partition and dynamics at a different mean SNR."""
        if avg_snr <= 0.0:
            raise DomainError(f"average SNR must be positive, got {avg_snr}")
        scale = avg_snr / self.avg_snr
        return replace(
            self,
            avg_snr=avg_snr,
            state_snrs=tuple(g * scale for g in self.state_snrs),
        )

    def validate(self, tol_row: float = 1e-12, tol_q: float = 1e-12) -> None:
        L = self.n_states
        if len(self.thresholds) != L + 1 or not math.isinf(self.thresholds[-1]):
            raise DomainError("thresholds must have L+1 entries ending at +inf")
        for a, b in zip(self.thresholds, self.thresholds[1:]):
            if not a < b:
                raise DomainError("thresholds must be strictly increasing")
        if abs(sum(self.q) - 1.0) > tol_q:
            raise DomainError(f"state probabilities sum to {sum(self.q)}, not 1")
        for i, row in enumerate(self.transitions):
            if abs(sum(row) - 1.0) > tol_row:
                raise DomainError(f"transition row {i} sums to {sum(row)}")
            for j, p in enumerate(row):
                if abs(i - j) > 1 and p != 0.0:
                    raise DomainError(f"non-tridiagonal entry P[{i}][{j}] = {p}")
                if not -tol_row <= p <= 1.0 + tol_row:
                    raise DomainError(f"P[{i}][{j}] = {p} outside [0, 1]")
        for a, b in zip(self.state_snrs, self.state_snrs[1:]):
            if not a < b:
                raise DomainError("state SNRs must be strictly increasing")

    def to_json(self) -> str:
        """Serialise to the documented JSON object.

        thresholds lists the L finite lower edges; the last state's upper
        edge is +inf by construction.  SNRs are stored in dB.
        """
        obj = {
            "L": self.n_states,
            "f_d_hz": self.f_d,
            "t_tb_s": self.t_tb,
            "avg_snr_db": linear_to_db(self.avg_snr),
            "thresholds": list(self.thresholds[:-1]),
            "q": list(self.q),
            "P": [list(row) for row in self.transitions],
            "state_snrs_db": [linear_to_db(g) for g in self.state_snrs],
            "c": self.c,
        }
        return json.dumps(obj, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "FsmcModel":
        obj = json.loads(text)
        model = cls(
            thresholds=tuple(obj["thresholds"]) + (math.inf,),
            q=tuple(obj["q"]),
            transitions=tuple(tuple(row) for row in obj["P"]),
            state_snrs=tuple(db_to_linear(x) for x in obj["state_snrs_db"]),
            avg_snr=db_to_linear(obj["avg_snr_db"]),
            f_d=obj["f_d_hz"],
            t_tb=obj["t_tb_s"],
            c=obj["c"],
        )
        model.validate(tol_row=1e-9, tol_q=1e-9)
        return model


def _assemble(
    etas: Sequence[float], f_d: float, t_tb: float, avg_snr: float, c: float
) -> FsmcModel:
    L = len(etas) - 1
    q = tuple(marginal_probability(etas[i], etas[i + 1]) for i in range(L))
    rows = []
    for i in range(L):
        up = level_crossing_rate(etas[i + 1], f_d) * t_tb / q[i] if i < L - 1 else 0.0
        down = level_crossing_rate(etas[i], f_d) * t_tb / q[i] if i > 0 else 0.0
        row = [0.0] * L
        row[i] = 1.0 - up - down
        if i < L - 1:
            row[i + 1] = up
        if i > 0:
            row[i - 1] = down
        rows.append(tuple(row))
    snrs = tuple(state_snr(etas[i], etas[i + 1], avg_snr) for i in range(L))
    model = FsmcModel(
        thresholds=tuple(etas),
        q=q,
        transitions=tuple(rows),
        state_snrs=snrs,
        avg_snr=avg_snr,
        f_d=f_d,
        t_tb=t_tb,
        c=c,
    )
    slacks = model.tb_bound_slacks()
    worst = min(range(L), key=lambda i: slacks[i])
    if slacks[worst] < 0.0:
        raise ConstructionError(
            f"time block t_tb={t_tb} exceeds the expected sojourn "
            f"{model.sojourn_times()[worst]:.6g} s of state {worst + 1}; "
            f"shorten t_tb or widen the states"
        )
    model.validate()
    return model


def build_equal_duration(L: int, f_d: float, t_tb: float, avg_snr: float) -> FsmcModel:
    """Build the model whose L states all share one expected sojourn time.

    The common normalised sojourn T solves a one-dimensional root problem:
    for a candidate T the first L-1 thresholds follow left to right, and T
    is adjusted until the leftover tail state's sojourn also equals T.
    """
    if L < 2:
        raise ConstructionError(f"equal-duration partitioning needs L >= 2, got {L}")
    spec = DopplerSpec(f_d, t_tb)
    if avg_snr <= 0.0:
        raise DomainError(f"average SNR must be positive, got {avg_snr}")

    def tail_gap(target: float) -> float:
        etas = _interior_thresholds(L - 1, target)
        if etas is None:
            return -1.0
        return _sojourn_norm(etas[-1], math.inf) - target

    lo = 1e-6 / L
    for _ in range(200):
        if tail_gap(lo) > 0.0:
            break
        lo *= 0.5
    else:
        raise ConstructionError(f"no lower bracket for the sojourn solve at L={L}")
    hi = 1.0
    for _ in range(200):
        if tail_gap(hi) <= 0.0:
            break
        hi *= 2.0
    else:
        raise ConstructionError(f"no upper bracket for the sojourn solve at L={L}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tail_gap(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    target = 0.5 * (lo + hi)
    etas = _interior_thresholds(L - 1, target)
    if etas is None:
        raise ConstructionError(f"equal-duration solve did not converge for L={L}")
    etas.append(math.inf)
    c = target / spec.normalized
    return _assemble(etas, f_d, t_tb, avg_snr, c)


def build_fixed_sojourn(L: int, c: float, f_d: float, t_tb: float, avg_snr: float) -> FsmcModel:
    """Build a model whose first L-1 states dwell exactly c time blocks.

    Thresholds are solved left to right for a per-state sojourn of
    c * t_tb; the last state absorbs the tail of the envelope, so its
    sojourn generally differs from c * t_tb.  Raises when the target
    sojourn is unreachable for some state, naming the largest feasible L.
    """
    if L < 2:
        raise ConstructionError(f"fixed-sojourn partitioning needs L >= 2, got {L}")
    if c < 1.0:
        raise ConstructionError(f"c must be >= 1 so that t_tb fits inside a state, got {c}")
    spec = DopplerSpec(f_d, t_tb)
    if avg_snr <= 0.0:
        raise DomainError(f"average SNR must be positive, got {avg_snr}")
    target = c * spec.normalized
    etas = _interior_thresholds(L - 1, target)
    if etas is None:
        feasible = 1
        probe = [0.0]
        while True:
            nxt = _solve_upper_threshold(probe[-1], target)
            if nxt is None:
                break
            probe.append(nxt)
            feasible += 1
        raise ConstructionError(
            f"sojourn target c*f_d*t_tb={target:.6g} is unreachable beyond state "
            f"{feasible}; at most L={feasible} states fit (requested {L})"
        )
    etas.append(math.inf)
    return _assemble(etas, f_d, t_tb, avg_snr, c)


def from_target_c(
    c_target: float, f_d: float, t_tb: float, avg_snr: float, max_states: int = 64
) -> FsmcModel:
    """Equal-duration model whose derived c lands closest to c_target.

    Scans L = 2 .. max_states, skipping state counts whose models violate
    the time-block bound.
    """
    best: FsmcModel | None = None
    for L in range(2, max_states + 1):
        try:
            model = build_equal_duration(L, f_d, t_tb, avg_snr)
        except ConstructionError:
            continue
        if best is None or abs(model.c - c_target) < abs(best.c - c_target):
            best = model
    if best is None:
        raise ConstructionError(
            f"no state count up to {max_states} yields a valid model at f_d*t_tb={f_d * t_tb:.6g}"
        )
    return best


def validate_tb_bound(model: FsmcModel) -> tuple[float, ...]:
    """Report-only wrapper returning per-state sojourn slack in seconds."""
    return model.tb_bound_slacks()
