"""HARQ outcome probabilities over the finite-state Markov channel.

The first transmission's state is drawn from the marginal q; each
retransmission advances the chain one step.  Writing A_j for the expected
error probability after j combined rounds,

    A_j = sum over state paths (l_0 .. l_{j-1}) of
          q_{l_0} * prod P_{l_{i-1}, l_i} * eps_j(path SNRs),

the outcome distribution telescopes exactly as in the fixed-SNR case:
p_0 = 1 - A_1, p_i = A_i - A_{i+1}, p_e = A_m.  Paths are enumerated
depth-first with running capacity/dispersion sums so each tree node costs
one kernel evaluation; the node count sum_j L^j is checked against an
enumeration budget first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceLimitError
from .fbl import DEFAULT_KERNEL, KernelOptions, q_function
from .fsmc import FsmcModel
from .outcomes import (
    HarqConfig,
    OutcomeDistribution,
    Scheme,
    distribution_from_prefix_errors,
)

DEFAULT_PATH_BUDGET = 10_000_000


def _check_budget(n_states: int, m: int, budget: int) -> None:
    nodes = 0
    power = 1
    for _ in range(m):
        power *= n_states
        nodes += power
        if nodes > budget:
            raise ResourceLimitError(
                f"state-path enumeration needs {nodes}+ nodes for L={n_states}, m={m}, "
                f"exceeding the budget of {budget}; use the Monte Carlo estimator instead"
            )


@dataclass(frozen=True)
class FadingOutcomeQuery:
    """An HARQ configuration paired with the channel model to evaluate it on."""

    cfg: HarqConfig
    model: FsmcModel
    kernel: KernelOptions = DEFAULT_KERNEL
    path_budget: int = DEFAULT_PATH_BUDGET


def _prefix_eps_factory(cfg: HarqConfig, kernel: KernelOptions):
    """Returns eps(depth, carry) and the carry update for one more round.

    carry is (capacity_sum, dispersion_sum, snr_sum); dispersion is kept in
    the kernel's units.  For chase combining only the SNR total matters.
    """
    n, k = cfg.code.n, cfg.code.k
    lengths = cfg.round_lengths()
    scale = kernel.dispersion_scale
    cum_lengths = []
    acc = 0
    for n_i in lengths:
        acc += n_i
        cum_lengths.append(acc)

    if cfg.scheme is Scheme.CC:

        def extend(carry, depth, gamma):
            cap, disp, snr_sum = carry
            return (0.0, 0.0, snr_sum + gamma)

        def eps(carry, depth):
            snr_sum = carry[2]
            v = (1.0 - (1.0 + snr_sum) ** -2) * scale
            if v == 0.0:
                return 1.0
            num = n * math.log2(1.0 + snr_sum) - k + math.log2(n)
            den = math.sqrt(n * v) if kernel.cc_denominator == "sqrt_nv" else n * math.sqrt(v)
            return min(1.0, max(0.0, q_function(num / den)))

    else:

        def extend(carry, depth, gamma):
            cap, disp, snr_sum = carry
            n_i = lengths[depth]
            return (
                cap + n_i * math.log2(1.0 + gamma),
                disp + n_i * (1.0 - (1.0 + gamma) ** -2),
                0.0,
            )

        def eps(carry, depth):
            cap, disp, _ = carry
            d = disp * scale
            if d == 0.0:
                return 1.0 if cap <= k else 0.0
            num = cap - k + math.log2(cum_lengths[depth - 1])
            return min(1.0, max(0.0, q_function(num / math.sqrt(d))))

    return eps, extend


def expected_prefix_errors(query: FadingOutcomeQuery) -> tuple[float, ...]:
    """A_1 .. A_m: path-averaged PER after each number of combined rounds."""
    cfg, model = query.cfg, query.model
    L, m = model.n_states, cfg.m
    _check_budget(L, m, query.path_budget)
    eps, extend = _prefix_eps_factory(cfg, query.kernel)
    P = model.transitions
    A = [0.0] * (m + 1)

    def walk(state: int, depth: int, prob: float, carry) -> None:
        carry = extend(carry, depth, model.state_snrs[state])
        depth += 1
        A[depth] += prob * eps(carry, depth)
        if depth < m:
            row = P[state]
            for nxt in range(L):
                p = row[nxt]
                if p > 0.0:
                    walk(nxt, depth, prob * p, carry)

    for l0 in range(L):
        if model.q[l0] > 0.0:
            walk(l0, 0, model.q[l0], (0.0, 0.0, 0.0))
    return tuple(A[1:])


def outcomes_fading(query: FadingOutcomeQuery) -> OutcomeDistribution:
    """Exact resolution-event distribution over the Markov fading channel.

    With a single-state model this reduces to the fixed-SNR distribution at
    that state's SNR.
    """
    return distribution_from_prefix_errors(expected_prefix_errors(query))


@dataclass(frozen=True)
class McOutcome:
    """Empirical outcome frequencies with binomial standard errors."""

    outcome: OutcomeDistribution
    stderr: tuple[float, ...]
    stderr_p_e: float
    trials: int


def _prefix_eps_tables(query: FadingOutcomeQuery) -> list[np.ndarray]:
    """eps_j lookup tables indexed by the state path, one per depth."""
    cfg, model = query.cfg, query.model
    L, m = model.n_states, cfg.m
    _check_budget(L, m, query.path_budget)
    eps, extend = _prefix_eps_factory(cfg, query.kernel)
    tables: list[np.ndarray] = []

    def fill(depth: int, carry, index: tuple[int, ...]) -> None:
        for s in range(L):
            nxt_carry = extend(carry, depth, model.state_snrs[s])
            idx = index + (s,)
            tables[depth][idx] = eps(nxt_carry, depth + 1)
            if depth + 1 < m:
                fill(depth + 1, nxt_carry, idx)

    for j in range(1, m + 1):
        tables.append(np.empty((L,) * j))
    fill(0, (0.0, 0.0, 0.0), ())
    return tables


def outcomes_fading_mc_check(query: FadingOutcomeQuery, trials: int, seed: int) -> McOutcome:
    """Monte Carlo replica of outcomes_fading on the same Markov model.

    Samples first-round states from q, walks the chain with the transition
    matrix, and resolves each packet against its path's running decoder
    error probabilities using a single uniform draw (the nested-failure
    coupling implied by the telescoped analytic model).  Agreement with
    outcomes_fading is limited only by sampling noise.
    """
    if trials < 10_000:
        raise DomainError(f"need at least 1e4 trials for stable frequencies, got {trials}")
    cfg, model = query.cfg, query.model
    L, m = model.n_states, cfg.m
    tables = _prefix_eps_tables(query)
    rng = np.random.default_rng(seed)

    q = np.asarray(model.q)
    states = [rng.choice(L, size=trials, p=q / q.sum())]
    cum_rows = np.cumsum(np.asarray(model.transitions), axis=1)
    for _ in range(m - 1):
        u = rng.random(trials)
        # clip guards the one-ulp shortfall of a row sum below 1.0
        nxt = np.minimum((u[:, None] > cum_rows[states[-1]]).sum(axis=1), L - 1)
        states.append(nxt)

    u_decode = rng.random(trials)
    resolved = np.full(trials, m, dtype=np.int64)  # m means residual error
    for j in range(1, m + 1):
        eps_j = tables[j - 1][tuple(states[:j])]
        newly = (resolved == m) & (u_decode >= eps_j)
        resolved[newly] = j - 1
    counts = np.bincount(resolved, minlength=m + 1)
    freq = counts / trials
    p = tuple(float(f) for f in freq[:m])
    p_e = float(freq[m])
    se = tuple(math.sqrt(f * (1.0 - f) / trials) for f in freq[:m])
    se_e = math.sqrt(p_e * (1.0 - p_e) / trials)
    return McOutcome(OutcomeDistribution(p, p_e), se, se_e, trials)
