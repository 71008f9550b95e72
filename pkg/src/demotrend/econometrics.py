"""Regression and time-series test machinery used by the validation battery.

Implements, on plain numpy linear algebra:

    ols             classical least squares with standard errors and t ratios
    adf             lagged-level t tests for a unit root, lags 0..max_lag
    dfgls           the same tests after local-to-unity GLS demeaning/detrending
    lag_select      VAR lag-order statistics: LR, FPE, AIC, HQIC, SBIC
    engle_granger   two-step residual cointegration test
    johansen        trace test for cointegration rank of a two-variable system
    var_fit         equation-by-equation VAR estimation

Conventions: "lag k" always means k lagged differences on the right-hand
side, so lag 0 is the plain no-augmentation regression. Information criteria
are scaled by the sample size, smaller is better. Critical values come from
`critvals` and every report names the source of each value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .critvals import LEVELS, adf_critical_values, dfgls_critical_values, trace_critical_5pct
from .errors import DegenerateInputError, SeriesError

TRENDS = ("none", "constant", "trend")


def _values(series) -> np.ndarray:
    """Accept a MonthlySeries or any 1-D array-like."""
    arr = getattr(series, "values", series)
    arr = np.asarray(arr, dtype=float)
    if arr.ndim != 1:
        raise SeriesError(f"expected a one-dimensional series, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise SeriesError("series contains non-finite values")
    return arr


def _matrix(y) -> np.ndarray:
    arr = np.asarray(getattr(y, "values", y), dtype=float)
    if arr.ndim != 2:
        raise SeriesError(f"expected a (T, k) matrix of observations, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise SeriesError("system contains non-finite values")
    return arr


@dataclass(frozen=True)
class OlsResult:
    """Classical least squares output.

    coef holds the regressor coefficients in column order with the intercept
    appended last when one was requested. rmse is the degrees-of-freedom
    adjusted root mean squared error sqrt(rss / (n - k)).
    """

    coef: np.ndarray
    se: np.ndarray
    tstats: np.ndarray
    residuals: np.ndarray
    r2: float
    rmse: float
    nobs: int
    n_params: int
    intercept: bool

    @property
    def rss(self) -> float:
        return float(self.residuals @ self.residuals)


def ols(y, x, intercept: bool = True) -> OlsResult:
    """Least squares of y on the columns of x, optionally plus an intercept."""
    yv = _values(y)
    X = np.asarray(getattr(x, "values", x), dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise SeriesError(f"regressors must form a (n, k) matrix, got shape {X.shape}")
    n = len(yv)
    if X.shape[0] != n:
        raise SeriesError(f"{n} observations but {X.shape[0]} regressor rows")
    if intercept:
        X = np.hstack([X, np.ones((n, 1))])
    k = X.shape[1]
    if n <= k:
        raise DegenerateInputError(f"{n} observations cannot identify {k} parameters")
    rank = np.linalg.matrix_rank(X)
    if rank < k:
        raise DegenerateInputError(f"design matrix is rank deficient: rank {rank} < {k} columns")
    coef, _, _, _ = np.linalg.lstsq(X, yv, rcond=None)
    resid = yv - X @ coef
    rss = float(resid @ resid)
    sigma2 = rss / (n - k)
    xtx_inv = np.linalg.inv(X.T @ X)
    se = np.sqrt(np.clip(sigma2 * np.diag(xtx_inv), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, coef / np.where(se > 0, se, 1.0), np.sign(coef) * np.inf)
    if intercept:
        tss = float(np.sum((yv - yv.mean()) ** 2))
    else:
        tss = float(yv @ yv)
    if tss > 0:
        r2 = 1.0 - rss / tss
    else:
        r2 = 1.0 if rss <= 1e-300 else 0.0
    for arr in (coef, se, tstats, resid):
        arr.flags.writeable = False
    return OlsResult(coef, se, tstats, resid, float(r2), float(math.sqrt(sigma2)), n, k, intercept)


@dataclass(frozen=True)
class UnitRootReport:
    """One unit-root regression: statistic, critical values and the verdict.

    reject_at is the tightest level ("1%", "5%" or "10%") at which the
    left-tailed test rejects, or None when it does not reject at all.
    """

    test: str
    lag: int
    trend: str
    statistic: float
    nobs: int
    crit: dict[str, float]
    crit_source: dict[str, str]
    reject_at: Optional[str]


def rejected_at(report: UnitRootReport, level: str) -> bool:
    """True when the report rejects at `level` or tighter."""
    if level not in LEVELS:
        raise SeriesError(f"unknown level {level!r}, expected one of {LEVELS}")
    if report.reject_at is None:
        return False
    return LEVELS.index(report.reject_at) <= LEVELS.index(level)


def _reject_level(statistic: float, crit: dict[str, float]) -> Optional[str]:
    for level in LEVELS:
        if statistic < crit[level]:
            return level
    return None


def _level_t_stat(y: np.ndarray, lag: int, trend: str) -> tuple[float, int]:
    """t ratio on the lagged level in the differenced regression at one lag."""
    T = len(y)
    dy = np.diff(y)
    nobs = T - 1 - lag
    dep = dy[lag:]
    cols = [y[lag : T - 1]]
    for i in range(1, lag + 1):
        cols.append(dy[lag - i : T - 1 - i])
    if trend in ("constant", "trend"):
        cols.append(np.ones(nobs))
    if trend == "trend":
        cols.append(np.arange(1.0, nobs + 1.0))
    X = np.column_stack(cols)
    res = ols(dep, X, intercept=False)
    return float(res.tstats[0]), nobs


def _check_unit_root_input(y: np.ndarray, max_lag: int, trend: str) -> None:
    if trend not in TRENDS:
        raise SeriesError(f"unknown trend spec {trend!r}, expected one of {TRENDS}")
    if not isinstance(max_lag, int) or max_lag < 0:
        raise SeriesError(f"max_lag must be a non-negative integer, got {max_lag!r}")
    if len(y) <= max_lag + 10:
        raise SeriesError(f"series of length {len(y)} too short for max_lag {max_lag}, need more than {max_lag + 10}")
    if np.ptp(y) == 0.0:
        raise DegenerateInputError("series is constant, the unit-root regression is undefined")


def adf(series, max_lag: int, trend: str = "constant") -> list[UnitRootReport]:
    """Unit-root t tests at every lag 0..max_lag.

    Each lag k regresses the first difference on the lagged level, k lagged
    differences and the deterministic terms named by `trend`, on the longest
    sample that lag allows. The statistic is the t ratio on the lagged
    level; rejection is left-tailed against the critical values for the
    regression's own sample size.
    """
    y = _values(series)
    _check_unit_root_input(y, max_lag, trend)
    reports = []
    for lag in range(max_lag + 1):
        stat, nobs = _level_t_stat(y, lag, trend)
        crit, source = adf_critical_values(nobs, trend)
        reports.append(
            UnitRootReport("adf", lag, trend, stat, nobs, crit, source, _reject_level(stat, crit))
        )
    return reports


def dfgls(series, max_lag: int, trend: str = "constant", cbar: Optional[float] = None) -> list[UnitRootReport]:
    """GLS-adjusted unit-root tests at every lag 0..max_lag.

    The series is first demeaned (trend "constant") or detrended (trend
    "trend") by generalized least squares at the local-to-unity point
    alpha = 1 + cbar/T, with cbar defaulting to -7 and -13.5 respectively.
    The adjusted series then goes through the lag-k regressions with no
    deterministic terms. cbar = 0 disables the adjustment entirely, which
    reduces every statistic to the plain test with trend "none"; trend
    "none" itself carries no deterministic component, so the GLS step is
    the identity there as well.
    """
    y = _values(series)
    _check_unit_root_input(y, max_lag, trend)
    T = len(y)
    if trend == "none" or cbar == 0:
        ytilde = y
    else:
        if cbar is None:
            cbar = -7.0 if trend == "constant" else -13.5
        abar = 1.0 + cbar / T
        if trend == "constant":
            D = np.ones((T, 1))
        else:
            D = np.column_stack([np.ones(T), np.arange(1.0, T + 1.0)])
        zy = np.concatenate([[y[0]], y[1:] - abar * y[:-1]])
        zD = np.vstack([D[:1], D[1:] - abar * D[:-1]])
        beta, _, _, _ = np.linalg.lstsq(zD, zy, rcond=None)
        ytilde = y - D @ beta
    reports = []
    for lag in range(max_lag + 1):
        stat, nobs = _level_t_stat(ytilde, lag, "none")
        crit, source = dfgls_critical_values(nobs, trend)
        reports.append(
            UnitRootReport("dfgls", lag, trend, stat, nobs, crit, source, _reject_level(stat, crit))
        )
    return reports


def _chi2_sf(x: float, df: int) -> float:
    """Upper tail of the chi-square distribution, exact recurrence."""
    if x <= 0:
        return 1.0
    if df % 2 == 0:
        q = math.exp(-x / 2.0)
        k = 2
    else:
        q = math.erfc(math.sqrt(x / 2.0))
        k = 1
    while k < df:
        q += (x / 2.0) ** (k / 2.0) * math.exp(-x / 2.0) / math.gamma(k / 2.0 + 1.0)
        k += 2
    return min(1.0, q)


@dataclass(frozen=True)
class LagOrderRow:
    lag: int
    loglik: float
    lr: Optional[float]
    lr_pvalue: Optional[float]
    fpe: float
    aic: float
    hqic: float
    sbic: float


@dataclass(frozen=True)
class LagSelection:
    """Per-lag information criteria and the lag each criterion selects."""

    rows: tuple[LagOrderRow, ...]
    selected: dict[str, Optional[int]]
    nobs: int


def lag_select(y, max_lag: int) -> LagSelection:
    """VAR lag-order selection statistics over lags 0..max_lag.

    All candidate orders are estimated on the common sample that max_lag
    allows, so the criteria are comparable. The log likelihood uses the
    Gaussian concentrated form with the maximum-likelihood residual
    covariance; AIC, HQIC and SBIC are (-2 ll + penalty * n_params) / T and
    FPE is |Sigma| * ((T + m)/(T - m))^k with m parameters per equation,
    smaller is better throughout. The LR column tests each order against
    the one below it; its selection is the largest order still significant
    at 5%.
    """
    Y = _matrix(y)
    T, K = Y.shape
    if not isinstance(max_lag, int) or max_lag < 1:
        raise SeriesError(f"max_lag must be a positive integer, got {max_lag!r}")
    if T <= 10 * max_lag:
        raise SeriesError(f"system of length {T} too short for max_lag {max_lag}, need more than {10 * max_lag}")
    t_eff = T - max_lag
    dep = Y[max_lag:]
    rows: list[LagOrderRow] = []
    prev_ll = None
    lls = []
    for p in range(max_lag + 1):
        cols = [np.ones((t_eff, 1))]
        for i in range(1, p + 1):
            cols.append(Y[max_lag - i : T - i])
        X = np.hstack(cols)
        m = X.shape[1]  # parameters per equation
        if t_eff <= m:
            raise DegenerateInputError(f"{t_eff} common observations cannot identify lag order {p}")
        B, _, rank, _ = np.linalg.lstsq(X, dep, rcond=None)
        if rank < m:
            raise DegenerateInputError(f"lag-{p} design matrix is rank deficient")
        E = dep - X @ B
        sigma = E.T @ E / t_eff
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0:
            raise DegenerateInputError(f"singular residual covariance at lag {p}; are the series duplicated?")
        ll = -0.5 * t_eff * (K * math.log(2.0 * math.pi) + K + logdet)
        n_params = K * m
        aic = (-2.0 * ll + 2.0 * n_params) / t_eff
        hqic = (-2.0 * ll + 2.0 * math.log(math.log(t_eff)) * n_params) / t_eff
        sbic = (-2.0 * ll + math.log(t_eff) * n_params) / t_eff
        if t_eff - m <= 0:
            raise DegenerateInputError(f"no residual degrees of freedom at lag {p}")
        fpe = ((t_eff + m) / (t_eff - m)) ** K * math.exp(logdet)
        if prev_ll is None:
            lr = pval = None
        else:
            lr = max(0.0, 2.0 * (ll - prev_ll))
            pval = _chi2_sf(lr, K * K)
        rows.append(LagOrderRow(p, ll, lr, pval, fpe, aic, hqic, sbic))
        prev_ll = ll
        lls.append(ll)

    def argmin(field: str) -> int:
        vals = [getattr(r, field) for r in rows]
        return int(np.argmin(vals))  # ties resolve to the smallest lag

    lr_pick: Optional[int] = None
    for r in rows[1:]:
        if r.lr_pvalue is not None and r.lr_pvalue < 0.05:
            lr_pick = r.lag  # largest significant order wins
    selected = {
        "lr": lr_pick,
        "fpe": argmin("fpe"),
        "aic": argmin("aic"),
        "hqic": argmin("hqic"),
        "sbic": argmin("sbic"),
    }
    return LagSelection(tuple(rows), selected, t_eff)


@dataclass(frozen=True)
class EngleGrangerResult:
    """First-stage regression plus unit-root tests on its residuals."""

    first_stage: OlsResult
    adf_residual: tuple[UnitRootReport, ...]
    dfgls_residual: tuple[UnitRootReport, ...]


def engle_granger(y, x, max_lag: int) -> EngleGrangerResult:
    """Two-step residual cointegration test.

    Stage one regresses y on x with an intercept; stage two runs the
    unit-root tests (plain and GLS variants, trend "none", lags
    0..max_lag) on the stage-one residuals. Identical inputs leave zero
    residuals and are rejected as degenerate.
    """
    yv = _values(y)
    xv = _values(x)
    if len(yv) != len(xv):
        raise SeriesError(f"series lengths differ: {len(yv)} vs {len(xv)}")
    first = ols(yv, xv[:, None], intercept=True)
    resid = np.asarray(first.residuals)
    scale = 1.0 + float(np.sqrt(np.mean(yv * yv)))
    if float(np.sqrt(np.mean(resid * resid))) <= 1e-12 * scale:
        raise DegenerateInputError("first-stage residuals are identically zero; the two series coincide")
    return EngleGrangerResult(
        first,
        tuple(adf(resid, max_lag, "none")),
        tuple(dfgls(resid, max_lag, "none")),
    )


@dataclass(frozen=True)
class JohansenReport:
    """Trace-test output for a two-variable system.

    eigenvalues are the two leading canonical correlations (descending, in
    [0, 1)); trace[r] is the statistic for the null of rank <= r, compared
    against the 5% critical value crit[r]. selected_rank is the first r not
    rejected, scanning r = 0, 1, or 2 when both are rejected.
    """

    trend: str
    lag: int
    nobs: int
    eigenvalues: tuple[float, ...]
    trace: tuple[float, ...]
    crit: tuple[float, ...]
    crit_source: tuple[str, ...]
    selected_rank: int


def johansen(y, lag: int, trend: str = "constant") -> JohansenReport:
    """Cointegration rank trace test of a two-variable system.

    `lag` is the level-VAR order, so the error-correction form regresses the
    first difference on lag-1 fewer lagged differences plus the lagged
    level. Trend specs: "none" has no deterministic terms, "rconstant"
    restricts a constant to the long-run relation (it joins the lagged
    level block), "constant" puts an unrestricted constant in the
    short-run regression.
    """
    Y = _matrix(y)
    T, K = Y.shape
    if K != 2:
        raise SeriesError(f"johansen expects exactly two series, got {K}")
    if trend not in ("none", "rconstant", "constant"):
        raise SeriesError(f"unknown trend spec {trend!r}, expected none, rconstant or constant")
    if not isinstance(lag, int) or lag < 1:
        raise SeriesError(f"lag must be a positive integer, got {lag!r}")
    if T <= 10 * lag:
        raise SeriesError(f"system of length {T} too short for lag {lag}, need more than {10 * lag}")
    p = lag
    dY = np.diff(Y, axis=0)
    n = T - p
    Z0 = dY[p - 1 :]
    Z1 = Y[p - 1 : T - 1]
    if trend == "rconstant":
        Z1 = np.hstack([Z1, np.ones((n, 1))])
    z2_cols = [dY[p - 1 - i : T - 1 - i] for i in range(1, p)]
    if trend == "constant":
        z2_cols.append(np.ones((n, 1)))
    if z2_cols:
        Z2 = np.hstack(z2_cols)
        B0, _, _, _ = np.linalg.lstsq(Z2, Z0, rcond=None)
        B1, _, _, _ = np.linalg.lstsq(Z2, Z1, rcond=None)
        R0 = Z0 - Z2 @ B0
        R1 = Z1 - Z2 @ B1
    else:
        R0, R1 = Z0, Z1
    S00 = R0.T @ R0 / n
    S01 = R0.T @ R1 / n
    S11 = R1.T @ R1 / n
    try:
        A = S01.T @ np.linalg.solve(S00, S01)
        L = np.linalg.cholesky(S11)
    except np.linalg.LinAlgError as exc:
        raise DegenerateInputError(f"singular moment matrices in the rank test: {exc}") from exc
    M = np.linalg.solve(L, np.linalg.solve(L, A).T).T
    M = (M + M.T) / 2.0
    lam = np.linalg.eigvalsh(M)[::-1]
    if lam[0] >= 1.0 - 1e-12 or lam[-1] < -1e-8:
        raise DegenerateInputError(f"canonical correlations outside [0, 1): {lam}")
    lam = np.clip(lam, 0.0, None)[:K]
    trace = tuple(float(-n * np.sum(np.log1p(-lam[r:]))) for r in range(K))
    crit, source = zip(*(trace_critical_5pct(trend, K - r) for r in range(K)))
    selected = K
    for r in range(K):
        if trace[r] < crit[r]:
            selected = r
            break
    return JohansenReport(trend, lag, n, tuple(float(v) for v in lam), trace, crit, source, selected)


@dataclass(frozen=True)
class VarFit:
    """Equation-by-equation VAR estimate with pooled fit statistics.

    Each equation's coefficients run lag-1 block, lag-2 block, ... with the
    intercept last; block column order follows the input columns. rmse pools
    residual sums of squares over equations with the usual degrees-of-freedom
    adjustment, and r2 pools centered total sums of squares.
    """

    equations: tuple[OlsResult, ...]
    lag: int
    nobs: int
    rmse: float
    r2: float


def var_fit(y, lag: int) -> VarFit:
    """Fit a VAR(lag) by least squares, one equation per input column."""
    Y = _matrix(y)
    T, K = Y.shape
    if not isinstance(lag, int) or lag < 1:
        raise SeriesError(f"lag must be a positive integer, got {lag!r}")
    if T <= 10 * lag:
        raise SeriesError(f"system of length {T} too short for lag {lag}, need more than {10 * lag}")
    dep = Y[lag:]
    X = np.hstack([Y[lag - i : T - i] for i in range(1, lag + 1)])
    equations = tuple(ols(dep[:, j], X, intercept=True) for j in range(K))
    rss = sum(eq.rss for eq in equations)
    dof = sum(eq.nobs - eq.n_params for eq in equations)
    tss = float(sum(np.sum((dep[:, j] - dep[:, j].mean()) ** 2) for j in range(K)))
    if tss <= 0:
        raise DegenerateInputError("system has zero variance")
    return VarFit(equations, lag, T - lag, float(math.sqrt(rss / dof)), float(1.0 - rss / tss))
