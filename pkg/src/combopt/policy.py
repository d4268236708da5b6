"""Factorized softmax sampling distribution over category strings.

A solution is a length-n integer array with entries in 1..m (categories are
1-based everywhere, including serialized output).  Each position j is drawn
independently from a softmax over column j of an (m, n) parameter table, so
the distribution factorizes and its log-likelihood gradient has the closed
form ``indicator(x_j = i) - P(x_j = i)`` per entry.
"""

import numpy as np


def _column_logsumexp(theta):
    # max-shifted so large parameter values cannot overflow exp
    top = theta.max(axis=0)
    return top + np.log(np.exp(theta - top).sum(axis=0))


def validate_solution(x, m, n):
    """Check that ``x`` is a valid length-n category string over 1..m."""
    x = np.asarray(x)
    if x.shape != (n,):
        raise ValueError(f"solution has shape {x.shape}, expected ({n},)")
    if not np.issubdtype(x.dtype, np.integer):
        raise ValueError("solution entries must be integers")
    if x.min(initial=1) < 1 or x.max(initial=m) > m:
        raise ValueError(f"solution entries must lie in 1..{m}")
    return x


class SoftmaxPolicy:
    """Product of n independent m-way softmax distributions.

    Parameters start at zero, which is the maximum-entropy (uniform)
    configuration.  ``theta[i, j]`` is the logit of category i+1 at
    position j.
    """

    def __init__(self, m, n, theta=None):
        if m < 2 or n < 1:
            raise ValueError("need m >= 2 categories and n >= 1 dimensions")
        self.m = int(m)
        self.n = int(n)
        if theta is None:
            theta = np.zeros((self.m, self.n))
        else:
            theta = np.array(theta, dtype=float)
            if theta.shape != (self.m, self.n):
                raise ValueError(f"theta has shape {theta.shape}, expected {(self.m, self.n)}")
            if not np.all(np.isfinite(theta)):
                raise ValueError("theta entries must be finite")
        self.theta = theta

    def copy(self):
        return SoftmaxPolicy(self.m, self.n, self.theta.copy())

    def probs(self):
        """Full (m, n) table of per-position category probabilities."""
        shifted = np.exp(self.theta - self.theta.max(axis=0))
        return shifted / shifted.sum(axis=0)

    def marginal(self, j):
        """Probability vector of position ``j`` (0-based), length m."""
        if not 0 <= j < self.n:
            raise IndexError(f"position {j} out of range for n={self.n}")
        col = np.exp(self.theta[:, j] - self.theta[:, j].max())
        return col / col.sum()

    def sample(self, rng):
        """Draw one solution (1-based categories) using ``rng``."""
        cum = np.cumsum(self.probs(), axis=0)
        cum[-1, :] = 1.0  # guard against cumulative rounding below 1
        u = rng.random(self.n)
        return (u[None, :] < cum).argmax(axis=0).astype(np.int64) + 1

    def log_prob(self, x):
        """Log-likelihood of a solution under the current parameters."""
        x = validate_solution(x, self.m, self.n)
        picked = self.theta[x - 1, np.arange(self.n)]
        return float(np.sum(picked - _column_logsumexp(self.theta)))

    def log_prob_gradient(self, x):
        """(m, n) gradient of ``log_prob`` at the current parameters.

        Entry (i, j) is ``1[x_j = i+1] - P(x_j = i+1)``; every column sums
        to zero and entries lie in [-1, 1].
        """
        x = validate_solution(x, self.m, self.n)
        grad = -self.probs()
        grad[x - 1, np.arange(self.n)] += 1.0
        return grad
