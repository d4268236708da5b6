"""Online optimization loops over category strings.

``adaptive_run`` is the main loop: sample one solution per step, score it,
and once a warm-up window has filled, push the parameters along the
weighted log-likelihood gradient.  ``exp3_run`` is the bandit comparison:
one Exp3 instance per position, all sharing the scalar gain.  Both track
the best solution seen over every evaluation (warm-up included) and stop
at budget exhaustion or, when enabled, at the dual moving-average
convergence test.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .policy import SoftmaxPolicy
from .surrogate import SCALED_CDF, ObjectiveWindow, SurrogateKind, weight
from .updates import make_rule


class BoundedGainError(ValueError):
    """Objective value left [0, 1] during a run that assumes bounded gains."""


@dataclass
class RunConfig:
    """Settings for one optimization run.

    ``window`` defaults to round(1/lr) when unset.  Convergence checking is
    off unless ``convergence_b`` is given; the clique protocol uses a fixed
    budget, the k-medoids protocol enables convergence.
    """

    budget: int
    surrogate: SurrogateKind | str = SCALED_CDF
    rule: str = "adagrad"
    lr: float = 0.01
    window: int | None = None
    seed: int = 0
    rule_options: dict = field(default_factory=dict)
    convergence_b: int | None = None
    convergence_a: float = 0.01
    convergence_threshold: float = 0.01
    exp3_gamma: float = 0.1
    track_trace: bool = False

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if isinstance(self.surrogate, str):
            self.surrogate = SurrogateKind.from_string(self.surrogate)
        if self.window is not None and self.window < 1:
            raise ValueError("window must be >= 1")

    @property
    def effective_window(self):
        if self.window is not None:
            return self.window
        return max(1, round(1.0 / self.lr))


@dataclass
class RunResult:
    """Outcome of a run; ``best_sample_index`` is the 1-based evaluation
    count at which ``best_y`` was first attained."""

    best_x: np.ndarray
    best_y: float
    best_sample_index: int
    total_evaluations: int
    seed: int
    trace: list | None = None
    final_policy: SoftmaxPolicy | None = None
    final_probs: np.ndarray | None = None
    pulls: np.ndarray | None = None


class EmaConvergence:
    """Plateau detector built on two exponential moving averages.

    Both averages are seeded with the first observation and updated with
    coefficients ``1 - exp(ln(a)/b)`` (fast) and ``1 - exp(ln(a)/(2b))``
    (slow), so an observation's influence decays to a fraction ``a`` after
    b and 2b steps respectively.  Because the averages share their seed,
    their gap is spuriously small while the seed's influence lingers;
    convergence is therefore only reported once 2b observations (the slow
    average's forget horizon) have been absorbed, after which it fires
    when the relative gap drops below the threshold.
    """

    def __init__(self, b, a=0.01, threshold=0.01):
        if b < 1:
            raise ValueError("b must be >= 1")
        if not 0.0 < a < 1.0:
            raise ValueError("a must be in (0, 1)")
        self.fast_coeff = 1.0 - math.exp(math.log(a) / b)
        self.slow_coeff = 1.0 - math.exp(math.log(a) / (2 * b))
        self.threshold = threshold
        self.warmup = 2 * int(b)
        self.count = 0
        self.fast = 0.0
        self.slow = 0.0

    def converged(self, y):
        """Absorb ``y``; report whether the two averages have met."""
        y = float(y)
        if self.count == 0:
            self.fast = y
            self.slow = y
        else:
            self.fast += self.fast_coeff * (y - self.fast)
            self.slow += self.slow_coeff * (y - self.slow)
        self.count += 1
        if self.count < self.warmup:
            return False
        return abs(self.fast - self.slow) / max(abs(self.slow), 1e-12) < self.threshold


def _make_convergence(config):
    if config.convergence_b is None:
        return None
    return EmaConvergence(
        config.convergence_b, a=config.convergence_a, threshold=config.convergence_threshold
    )


def adaptive_run(objective, policy, config):
    """Optimize ``objective`` by reweighted likelihood ascent.

    ``policy`` supplies the initial parameters and is not mutated; the run
    works on a copy.  Per step: sample x, evaluate y, and once more than
    ``k`` values have been seen, weight the log-likelihood gradient of x by
    the configured surrogate of y against the previous k values and hand it
    to the update rule.  The window absorbs y on every step, warm-up
    included.  Identical (seed, config, objective) give bit-identical
    results.
    """
    rng = np.random.default_rng(config.seed)
    pol = policy.copy()
    k = config.effective_window
    window = ObjectiveWindow(k)
    rule = make_rule(config.rule, lr=config.lr, **config.rule_options)
    convergence = _make_convergence(config)
    trace = [] if config.track_trace else None

    best_x = None
    best_y = -math.inf
    best_index = 0
    total = 0
    for t in range(1, config.budget + 1):
        x = pol.sample(rng)
        y = float(objective(x))
        total = t
        if y > best_y:
            best_x, best_y, best_index = x.copy(), y, t
        w = None
        if t > k:
            w = weight(config.surrogate, window, y)
            pol.theta = rule.add(pol.theta, w * pol.log_prob_gradient(x))
        window.push(y)
        if trace is not None:
            trace.append((y, w))
        if convergence is not None and convergence.converged(y):
            break

    return RunResult(
        best_x=best_x,
        best_y=best_y,
        best_sample_index=best_index,
        total_evaluations=total,
        seed=config.seed,
        trace=trace,
        final_policy=pol,
    )


def exp3_run(objective, m, n, config):
    """Per-position Exp3 over m arms, sharing one scalar gain in [0, 1].

    Each position mixes a softmax over its log-weights with uniform
    exploration at rate ``config.exp3_gamma``, pulls an arm, and applies
    the importance-weighted gain estimate of the observed y to the pulled
    arm's log-weight.  The increments pass through the configured addition
    rule; the canonical algorithm corresponds to rule "sga" with lr=1.0.
    Objective values outside [0, 1] abort the run.
    """
    gamma = config.exp3_gamma
    if not 0.0 < gamma <= 1.0:
        raise ValueError("exp3_gamma must be in (0, 1]")
    rng = np.random.default_rng(config.seed)
    logw = np.zeros((m, n))
    rule = make_rule(config.rule, lr=config.lr, **config.rule_options)
    convergence = _make_convergence(config)
    trace = [] if config.track_trace else None
    pulls = [] if config.track_trace else None

    def mixed_probs():
        shifted = np.exp(logw - logw.max(axis=0))
        return (1.0 - gamma) * (shifted / shifted.sum(axis=0)) + gamma / m

    columns = np.arange(n)
    best_x = None
    best_y = -math.inf
    best_index = 0
    total = 0
    for t in range(1, config.budget + 1):
        probs = mixed_probs()
        cum = np.cumsum(probs, axis=0)
        cum[-1, :] = 1.0
        x = (rng.random(n)[None, :] < cum).argmax(axis=0).astype(np.int64) + 1

        y = float(objective(x))
        if not 0.0 <= y <= 1.0:
            raise BoundedGainError(f"objective value {y} outside [0, 1] at step {t}")
        total = t
        if y > best_y:
            best_x, best_y, best_index = x.copy(), y, t

        delta = np.zeros((m, n))
        delta[x - 1, columns] = (gamma / m) * y / probs[x - 1, columns]
        logw = rule.add(logw, delta)

        if trace is not None:
            trace.append((y, None))
            pulls.append(x.copy())
        if convergence is not None and convergence.converged(y):
            break

    return RunResult(
        best_x=best_x,
        best_y=best_y,
        best_sample_index=best_index,
        total_evaluations=total,
        seed=config.seed,
        trace=trace,
        final_probs=mixed_probs(),
        pulls=None if pulls is None else np.array(pulls),
    )
