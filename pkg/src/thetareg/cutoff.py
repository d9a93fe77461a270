"""Smooth dyadic bump weights and sharp windows.

The smooth bump is built from the classic C^infinity step g(u) = e^(-1/u)
(extended by 0 for u <= 0):

    phi(x) = g(2 - x) / (g(2 - x) + g(x - 1))   for 1 < x < 2,
    phi = 1 on x <= 1,  phi = 0 on x >= 2,
    chi(x) = phi(x) - phi(2x).

chi is supported in [1/2, 2] (bit-exact zeros outside), equals 1 at x = 1,
rises on [1/2, 1] and falls on [1, 2] (total variation exactly 2), and its
dyadic dilates partition unity: sum_{j in Z} chi(2^-j x) = 1 for every
x > 0, with phi(x) itself playing the role of the whole j <= 0 tail.
The symmetry g(2-x)/(g(2-x)+g(x-1)) gives phi(1+u) + phi(2-u) = 1, from
which int_0^inf chi = (3/2)/2 = 3/4 exactly.

A WeightVector is one block of per-frequency coefficients w_n >= 0 for
|n| in a window [M, N]: either the smooth chi(2^-j |n|), the sharp
indicator of 2^(j-1) < |n| <= 2^(j+1), a sharp window on given [M, N], or
a one-sided variant (w_{-n} = 0) used by the growing-window monitor.
It carries the bookkeeping the lower-bound probes need: window, two-sided
mass, l2 norm, and discrete total variation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "CutoffFunction",
    "make_smooth_cutoff",
    "WeightVector",
    "smooth_weights",
    "rough_weights",
    "unit_window",
    "one_sided_unit",
]


def _smooth_step(u: np.ndarray) -> np.ndarray:
    """g(u) = exp(-1/u) for u > 0, else 0; infinitely flat at 0."""
    u = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def _phi(x: np.ndarray) -> np.ndarray:
    """1 on x <= 1, 0 on x >= 2, smooth monotone join in between."""
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x)
    out[x >= 2.0] = 0.0
    mid = (x > 1.0) & (x < 2.0)
    if np.any(mid):
        a = _smooth_step(2.0 - x[mid])
        b = _smooth_step(x[mid] - 1.0)
        out[mid] = a / (a + b)
    return out


def _chi(x: np.ndarray) -> np.ndarray:
    return _phi(x) - _phi(2.0 * np.asarray(x, dtype=np.float64))


@dataclass(frozen=True)
class CutoffFunction:
    """The dyadic bump with its analytically known constants.

    kappa bounds the total variation of one copy of chi on a half-line
    (one monotone rise plus one monotone fall: exactly 2); integral is
    int_0^inf chi = 3/4, exact by the phi(1+u) + phi(2-u) = 1 symmetry.
    """

    kappa: float = 2.0
    support: tuple[float, float] = (0.5, 2.0)
    integral: float = 0.75

    def __call__(self, x) -> np.ndarray:
        return _chi(x)

    def plateau(self, x) -> np.ndarray:
        """The underlying step phi (the j = 0 weight profile)."""
        return _phi(x)

    def partition_sum(self, x, j_lo: int, j_hi: int) -> np.ndarray:
        """sum_{j=j_lo}^{j_hi} chi(2^-j x); equals 1 well inside the range."""
        x = np.asarray(x, dtype=np.float64)
        total = np.zeros_like(x)
        for j in range(j_lo, j_hi + 1):
            total += _chi(x * 2.0 ** -j)
        return total


def make_smooth_cutoff() -> CutoffFunction:
    return CutoffFunction()


@dataclass
class WeightVector:
    """Coefficients of one frequency block.

    w_pos[n] is the weight of +n for n = 0..N; w_neg[n] the weight of -n
    (w_neg is None for symmetric blocks, meaning w_neg == w_pos). M and N
    delimit the support window: w_pos[n] == 0 for 0 < n < M and n > N
    (n = 0 itself only carries weight in the lowest block).
    """

    j: int | None
    M: int
    N: int
    w_pos: np.ndarray
    w_neg: np.ndarray | None
    mode: str

    def __post_init__(self) -> None:
        self.w_pos = np.asarray(self.w_pos, dtype=np.float64)
        if self.w_pos.shape != (self.N + 1,):
            raise DomainError("w_pos must have length N + 1")
        if self.w_neg is not None:
            self.w_neg = np.asarray(self.w_neg, dtype=np.float64)
            if self.w_neg.shape != (self.N + 1,):
                raise DomainError("w_neg must have length N + 1")
        if self.M < 0 or self.N < self.M:
            raise DomainError("need 0 <= M <= N")

    @property
    def symmetric(self) -> bool:
        return self.w_neg is None

    def neg(self) -> np.ndarray:
        """Weights of -n indexed by n (index 0 is meaningless, kept for shape)."""
        return self.w_pos if self.w_neg is None else self.w_neg

    def count_nonzero(self) -> int:
        """Number of integer frequencies with nonzero weight (two-sided)."""
        pos = int(np.count_nonzero(self.w_pos))
        negside = int(np.count_nonzero(self.neg()[1:]))
        return pos + negside

    def window_mass(self) -> float:
        """sum over M <= n <= N of (w_n + w_{-n})."""
        lo = max(self.M, 1)
        mass = float(self.w_pos[lo:].sum() + self.neg()[lo:].sum())
        if self.M == 0:
            mass += float(self.w_pos[0])
        return mass

    def l2_squared(self) -> float:
        return float((self.w_pos ** 2).sum() + (self.neg()[1:] ** 2).sum())

    def _line(self) -> np.ndarray:
        """Weights on -N-1..N+1 as one array (zero padded ends)."""
        left = self.neg()[1:][::-1]
        return np.concatenate(([0.0], left, self.w_pos, [0.0]))

    def tv(self) -> float:
        """Discrete total variation sum |w_{n+1} - w_n| over the whole line."""
        line = self._line()
        return float(np.abs(np.diff(line)).sum())

    def tv_one_sided(self) -> float:
        """Total variation of n -> w_n over n >= 0 (padded with zero at N+1)."""
        line = np.concatenate((self.w_pos, [0.0]))
        return float(np.abs(np.diff(line)).sum())


def _block_bounds(j: int) -> tuple[int, int]:
    if j < 0:
        raise DomainError("block index must be >= 0")
    if j == 0:
        return 0, 2
    return 2 ** (j - 1) + 1, 2 ** (j + 1)


def smooth_weights(j: int, cutoff: CutoffFunction | None = None) -> WeightVector:
    """Smooth dyadic block: w_n = chi(2^-j n); the j = 0 block uses phi."""
    cut = cutoff or make_smooth_cutoff()
    M, N = _block_bounds(j)
    n = np.arange(N + 1, dtype=np.float64)
    if j == 0:
        w = cut.plateau(n)
    else:
        w = np.zeros(N + 1)
        inner = np.arange(M, N + 1, dtype=np.float64)
        w[M:] = cut(inner * 2.0 ** -j)
    return WeightVector(j=j, M=M, N=N, w_pos=w, w_neg=None, mode="smooth")


def rough_weights(j: int) -> WeightVector:
    """Sharp dyadic block: indicator of 2^(j-1) < |n| <= 2^(j+1) (j = 0: |n| <= 2)."""
    M, N = _block_bounds(j)
    w = np.zeros(N + 1)
    w[M:] = 1.0
    if j == 0:
        w[0] = 1.0
    return WeightVector(j=j, M=M, N=N, w_pos=w, w_neg=None, mode="rough")


def unit_window(M: int, N: int) -> WeightVector:
    """Unit weights on M <= |n| <= N, both sides."""
    if M < 1:
        raise DomainError("windows start at M >= 1 (n = 0 has no phase)")
    w = np.zeros(N + 1)
    w[M:] = 1.0
    return WeightVector(j=None, M=M, N=N, w_pos=w, w_neg=None, mode="unit")


def one_sided_unit(M: int, N: int) -> WeightVector:
    """Unit weights on M <= n <= N only (nothing on the negative side)."""
    if M < 1:
        raise DomainError("windows start at M >= 1 (n = 0 has no phase)")
    w = np.zeros(N + 1)
    w[M:] = 1.0
    return WeightVector(j=None, M=M, N=N, w_pos=w, w_neg=np.zeros(N + 1),
                        mode="one-sided")
