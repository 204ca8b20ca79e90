"""Exact rational checks of the inequalities behind the competitive ratios."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidParameter
from .online import p_alpha

ALPHA_TOL = 1e-9


@dataclass(frozen=True)
class BoundCheckResult:
    check: str
    m: int
    k: int
    p: Fraction | None
    lhs: Fraction
    rhs: Fraction | float
    holds: bool
    equality: bool

    def row(self) -> str:
        status = "PASS" if self.holds else "FAIL"
        p = "" if self.p is None else f" p={float(self.p):.6f}"
        return (f"{status} {self.check:<10} m={self.m:<4} k={self.k:<3}{p} "
                f"lhs={float(self.lhs):.12f} rhs={float(self.rhs):.12f}"
                f"{' (equal)' if self.equality else ''}")


def _positive_ints(**kw):
    for name, v in kw.items():
        if int(v) != v or v < 1:
            raise InvalidParameter(f"{name} must be a positive integer, got {v!r}")


def _plus(x):
    return x if x > 0 else 0


def falling_sum(m: int, k: int) -> Fraction:
    """(1/m) sum_t prod_{i<t} (1 - k/(m-t+i))_+ , exactly.

    The factors run over j = m-t+1 .. m-1 as (j-k)/j, clamped at zero.
    """
    _positive_ints(m=m, k=k)
    total = Fraction(0)
    for t in range(1, m + 1):
        js = range(m - t + 1, m)
        if any(j <= k for j in js):
            continue
        total += Fraction(math.prod(j - k for j in js), math.prod(js))
    return total / m


def check_falling(m: int, k: int) -> BoundCheckResult:
    val = falling_sum(m, k)
    rhs = Fraction(1, k + 1)
    expected = rhs if m >= k + 1 else Fraction(1, m)
    return BoundCheckResult("falling", m, k, None, val, rhs,
                            holds=val >= rhs and val == expected, equality=val == rhs)


def iid_geometric_bound(m: int, k: int) -> Fraction:
    """(1/m) sum_{t=1}^m (1 - k/m)^(t-1), exactly; requires 1 <= k <= m."""
    _positive_ints(m=m, k=k)
    if k > m:
        raise InvalidParameter("need k <= m")
    q = 1 - Fraction(k, m)
    return sum((q ** t for t in range(m)), Fraction(0)) / m


def check_iid(m: int, k: int) -> BoundCheckResult:
    val = iid_geometric_bound(m, k)
    closed = (1 - (1 - Fraction(k, m)) ** m) / k
    limit = (1 - math.exp(-k)) / k
    ok = val == closed and float(val) >= limit - 1e-12
    return BoundCheckResult("iid", m, k, None, val, limit, holds=ok, equality=False)


def window_sums(m: int, k: int) -> list[Fraction]:
    """S[tau] = sum_{t=tau+1}^m prod_{i=tau+1}^{t-1} (1 - k/i)_+ for tau = 0..m.

    Uses S[tau] = 1 + (1 - k/(tau+1))_+ * S[tau+1] with S[m] = 0.
    """
    s = [Fraction(0)] * (m + 1)
    for tau in range(m - 1, -1, -1):
        s[tau] = 1 + _plus(1 - Fraction(k, tau + 1)) * s[tau + 1]
    return s


def secretary_window_value(m: int, k: int, p) -> Fraction:
    """E_tau[(1/m) S[tau]] for tau ~ Binomial(m, p), by full enumeration."""
    _positive_ints(m=m, k=k)
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise InvalidParameter("p must lie in [0, 1]")
    s = window_sums(m, k)
    a, b = p.numerator, p.denominator
    num = sum(math.comb(m, tau) * a ** tau * (b - a) ** (m - tau) * s[tau] for tau in range(m + 1))
    return num / (b ** m * m)


def rational_p(k: int, max_den: int = 10 ** 9) -> tuple[Fraction, float]:
    """A rational stand-in for p_k and a bound on its distance to p_k."""
    p_float, _ = p_alpha(k)
    if k == 2:
        return Fraction(1, 2), 0.0
    approx = Fraction(p_float).limit_denominator(max_den)
    # float p_k carries at most one ulp of rounding from the true value
    err = abs(float(approx - Fraction(p_float))) + math.ulp(p_float)
    return approx, err


def check_secretary(m: int, k: int) -> BoundCheckResult:
    """value(m, k, p_k) >= alpha_k - 1e-9, allowing for the p_k approximation.

    The expectation of a [0, 1]-valued function of Bin(m, p) moves by at
    most m per unit change of p, so the error budget is m * |p - p_k|.
    """
    p, err = rational_p(k)
    _, alpha = p_alpha(k)
    val = secretary_window_value(m, k, p)
    slack = ALPHA_TOL + m * err
    return BoundCheckResult("secretary", m, k, p, val, alpha,
                            holds=float(val) >= alpha - slack, equality=False)


def hockey_stick_check(m: int, k: int) -> bool:
    """sum_{t=1}^m C(m-t, k) == C(m, k+1)."""
    if not (m >= k + 1 >= 2):
        raise InvalidParameter("need m >= k + 1 >= 2")
    return sum(math.comb(m - t, k) for t in range(1, m + 1)) == math.comb(m, k + 1)


def check_hockey(m: int, k: int) -> BoundCheckResult:
    lhs = sum(math.comb(m - t, k) for t in range(1, m + 1))
    rhs = math.comb(m, k + 1)
    return BoundCheckResult("hockey", m, k, None, Fraction(lhs), Fraction(rhs),
                            holds=lhs == rhs, equality=lhs == rhs)


def run_grid(check: str, m_max: int, k_max: int) -> list[BoundCheckResult]:
    """All parameter pairs the acceptance grid uses for one family."""
    out = []
    if check == "falling":
        for m in range(1, m_max + 1):
            for k in range(1, k_max + 1):
                out.append(check_falling(m, k))
    elif check == "iid":
        for m in range(1, m_max + 1):
            for k in range(1, min(k_max, m) + 1):
                out.append(check_iid(m, k))
    elif check == "secretary":
        for k in range(1, k_max + 1):
            for m in range(1, m_max + 1):
                out.append(check_secretary(m, k))
    elif check == "hockey":
        for m in range(2, m_max + 1):
            for k in range(1, min(k_max, m - 1) + 1):
                out.append(check_hockey(m, k))
    else:
        raise InvalidParameter(f"unknown check {check!r}")
    return out
