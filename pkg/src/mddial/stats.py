"""Statistical testing suite: Pearson chi-squared, Mann-Whitney (exact
enumeration for small samples, tie-corrected normal approximation
otherwise), Yuen's trimmed-mean robust t-test, the pooled z-test with
continuity correction for proportions, and TOST equivalence built on top.

Test statistics are computed here from first principles; scipy supplies
only the reference distribution functions (normal, chi-squared, t). No
multiple-comparison correction is applied anywhere.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy import stats as _dist


@dataclass(frozen=True)
class TostSpec:
    """Equivalence margin: on proportions, an absolute difference; on
    Likert data, a fraction of the scale range (epsilon * likert_range
    points, 0.10 * 5 = 0.5 points on a 6-point scale)."""

    epsilon: float = 0.10
    alpha: float = 0.05
    flavor: str = "proportions"  # or "likert"
    likert_range: float = 5.0
    trim: float = 0.2

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.alpha < 0.5:
            raise ValueError("alpha must be in (0, 0.5)")
        if self.flavor not in ("proportions", "likert"):
            raise ValueError(f"unknown flavor {self.flavor!r}")

    @property
    def margin(self):
        return self.epsilon * self.likert_range if self.flavor == "likert" else self.epsilon


@dataclass(frozen=True)
class EquivalenceResult:
    delta: float
    p_lo: float      # one-sided p for H_lo: delta <= -margin
    p_hi: float      # one-sided p for H_hi: delta >= +margin
    p_tost: float    # max(p_lo, p_hi)
    equivalent: bool
    margin: float
    test: str


def _validate_counts(a_succ, a_n, b_succ, b_n):
    for succ, n in ((a_succ, a_n), (b_succ, b_n)):
        if n <= 0:
            raise ValueError("group totals must be positive")
        if not 0 <= succ <= n:
            raise ValueError("successes must lie in [0, total]")


def chi_squared_2x2(a_succ, a_n, b_succ, b_n):
    """Pearson chi-squared (no Yates correction) on the 2x2 success table;
    p from the chi-squared distribution with 1 df."""
    _validate_counts(a_succ, a_n, b_succ, b_n)
    table = np.array(
        [[a_succ, a_n - a_succ], [b_succ, b_n - b_succ]], dtype=np.float64
    )
    n = table.sum()
    row = table.sum(axis=1)
    col = table.sum(axis=0)
    if (col == 0).any():  # identical degenerate proportions
        return 0.0, 1.0
    expected = np.outer(row, col) / n
    statistic = float(((table - expected) ** 2 / expected).sum())
    return statistic, float(_dist.chi2.sf(statistic, df=1))


def _u_statistic(x, y):
    """U for the x side with 0.5 credit for ties."""
    u = 0.0
    for xi in x:
        for yj in y:
            if xi > yj:
                u += 1.0
            elif xi == yj:
                u += 0.5
    return u


MAX_EXACT_COMBINATIONS = 50_000


def _mann_whitney_exact(x, y):
    """Two-sided p by full enumeration of group assignments (handles ties).
    p = 2 * min(P(U <= u), P(U >= u)), capped at 1."""
    pooled = list(x) + list(y)
    n = len(x)
    u_obs = _u_statistic(x, y)
    lower = higher = total = 0
    idx = range(len(pooled))
    for chosen in combinations(idx, n):
        chosen_set = set(chosen)
        xs = [pooled[i] for i in chosen]
        ys = [pooled[i] for i in idx if i not in chosen_set]
        u = _u_statistic(xs, ys)
        total += 1
        if u <= u_obs + 1e-12:
            lower += 1
        if u >= u_obs - 1e-12:
            higher += 1
    p = 2.0 * min(lower / total, higher / total)
    return min(1.0, p)


def _mann_whitney_normal(x, y):
    """Tie-corrected normal approximation with continuity correction."""
    n, m = len(x), len(y)
    big_n = n + m
    u = _u_statistic(x, y)
    mu = n * m / 2.0
    _, counts = np.unique(np.concatenate([x, y]), return_counts=True)
    tie_term = float((counts**3 - counts).sum()) / (big_n * (big_n - 1))
    var = n * m / 12.0 * ((big_n + 1) - tie_term)
    if var <= 0:
        return 1.0
    shift = u - mu
    shift -= math.copysign(min(0.5, abs(shift)), shift)  # continuity, toward the mean
    z = shift / math.sqrt(var)
    return float(2.0 * _dist.norm.sf(abs(z)))


def mann_whitney(x, y):
    """Two-sided Mann-Whitney. Exact enumeration whenever the assignment
    count is tractable (covers every sample size the exactness contract in
    the test suite relies on), normal approximation beyond that."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) == 0 or len(y) == 0:
        raise ValueError("both samples must be non-empty")
    u = _u_statistic(x, y)
    if math.comb(len(x) + len(y), len(x)) <= MAX_EXACT_COMBINATIONS:
        return u, _mann_whitney_exact(x, y)
    return u, _mann_whitney_normal(x, y)


def _trimmed_stats(x, trim):
    """(trimmed mean, winsorized ddof-1 variance, retained count h)."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    n = len(x)
    g = int(trim * n)
    h = n - 2 * g
    if h < 2:
        raise ValueError("sample too small after trimming")
    trimmed_mean = float(x[g : n - g].mean())
    w = x.copy()
    w[:g] = x[g]
    w[n - g :] = x[n - g - 1]
    win_var = float(w.var(ddof=1))
    return trimmed_mean, win_var, h, n


def yuen_t(x, y, trim=0.2, shift=0.0):
    """Yuen's robust t: trimmed-mean difference (minus shift) over
    winsorized standard errors, Welch-style df. Returns
    (statistic, df, one-sided p for the 'greater' alternative)."""
    mx, vx, hx, nx = _trimmed_stats(x, trim)
    my, vy, hy, ny = _trimmed_stats(y, trim)
    dx = (nx - 1) * vx / (hx * (hx - 1))
    dy = (ny - 1) * vy / (hy * (hy - 1))
    se = math.sqrt(dx + dy)
    if se == 0:
        statistic = 0.0 if mx - my - shift == 0 else math.copysign(math.inf, mx - my - shift)
    else:
        statistic = (mx - my - shift) / se
    if dx + dy > 0:
        df = (dx + dy) ** 2 / (dx**2 / (hx - 1) + dy**2 / (hy - 1))
    else:
        df = hx + hy - 2
    p_greater = float(_dist.t.sf(statistic, df)) if math.isfinite(statistic) else (0.0 if statistic > 0 else 1.0)
    return statistic, df, p_greater


def pooled_z(a_succ, a_n, b_succ, b_n, shift=0.0, direction="greater", continuity=True):
    """z-test of H0: p_a - p_b = shift with a pooled variance estimate and a
    half-count continuity correction applied toward the null.

    With shift=0 and continuity=False, z**2 equals the Pearson chi-squared
    statistic. direction picks the one-sided alternative on p_a - p_b - shift.
    """
    _validate_counts(a_succ, a_n, b_succ, b_n)
    if direction not in ("greater", "less"):
        raise ValueError("direction must be 'greater' or 'less'")
    p1 = a_succ / a_n
    p2 = b_succ / b_n
    pooled = (a_succ + b_succ) / (a_n + b_n)
    var = pooled * (1.0 - pooled) * (1.0 / a_n + 1.0 / b_n)
    if var == 0:
        if shift == 0:
            raise ValueError("degenerate table: no variation and no shift to test against")
        var = 0.0
    numerator = p1 - p2 - shift
    if continuity:
        correction = 0.5 * (1.0 / a_n + 1.0 / b_n)
        numerator -= math.copysign(min(correction, abs(numerator)), numerator)
    if var == 0:
        z = 0.0 if numerator == 0 else math.copysign(math.inf, numerator)
    else:
        z = numerator / math.sqrt(var)
    if direction == "greater":
        p = float(_dist.norm.sf(z)) if math.isfinite(z) else (0.0 if z > 0 else 1.0)
    else:
        p = float(_dist.norm.cdf(z)) if math.isfinite(z) else (0.0 if z < 0 else 1.0)
    return z, p


def tost(data_a, data_b, spec=TostSpec()):
    """Two one-sided tests for equivalence: both H_lo (delta <= -margin) and
    H_hi (delta >= +margin) must be rejected at alpha to conclude
    -margin < delta < +margin. p_tost = max of the two one-sided p values.

    proportions flavor: data are (successes, total) pairs, tested with the
    pooled z-test at shifted nulls. likert flavor: data are rating samples,
    tested with Yuen's robust t at shifted nulls.
    """
    margin = spec.margin
    if spec.flavor == "proportions":
        (a_succ, a_n), (b_succ, b_n) = data_a, data_b
        delta = a_succ / a_n - b_succ / b_n
        _, p_lo = pooled_z(a_succ, a_n, b_succ, b_n, shift=-margin, direction="greater")
        _, p_hi = pooled_z(a_succ, a_n, b_succ, b_n, shift=+margin, direction="less")
        test = "pooled-z"
    else:
        x = np.asarray(data_a, dtype=np.float64)
        y = np.asarray(data_b, dtype=np.float64)
        mx, _, _, _ = _trimmed_stats(x, spec.trim)
        my, _, _, _ = _trimmed_stats(y, spec.trim)
        delta = mx - my
        t_lo, df_lo, p_lo = yuen_t(x, y, trim=spec.trim, shift=-margin)
        t_hi, df_hi, _ = yuen_t(x, y, trim=spec.trim, shift=+margin)
        p_hi = float(_dist.t.cdf(t_hi, df_hi))
        test = "yuen"
    p_tost = max(p_lo, p_hi)
    return EquivalenceResult(
        delta=float(delta),
        p_lo=float(p_lo),
        p_hi=float(p_hi),
        p_tost=float(p_tost),
        equivalent=bool(p_tost < spec.alpha),
        margin=margin,
        test=test,
    )
