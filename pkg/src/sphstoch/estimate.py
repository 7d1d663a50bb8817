"""Spectrum and covariance estimation, and coefficient-law diagnostics.

The diagnostics empirically verify the characterization of the random
expansion coefficients: zero mean, unit variance, no cross-correlation,
the exact conjugation symmetry in symmetric mode, half-variance uncorrelated
real and imaginary parts, the Cauchy law of their ratio, and per-margin
normality. Thresholds are multiples of the Monte-Carlo standard error so the
whole battery has a small family-wise false-alarm rate; they are
configuration values, not constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridLookupError, SampleSizeError
from .fields import CoefficientEnsemble, Symmetry
from .harmonics import TriangularCoefficients, lm_index
from .rotations import SpherePoint


@dataclass
class SpectrumEstimate:
    """C_hat_l = (1/(2l+1)) sum_m |a_lm|^2, averaged over the realizations."""

    l_max: int
    spin: int
    c_hat_l: np.ndarray
    n_realizations: int


def estimate_cl(coeffs: TriangularCoefficients) -> SpectrumEstimate:
    c_hat = np.empty(coeffs.l_max + 1)
    for l in range(coeffs.l_max + 1):
        block = coeffs.values[l * l : (l + 1) ** 2]
        c_hat[l] = np.sum(np.abs(block) ** 2) / (2 * l + 1)
    return SpectrumEstimate(coeffs.l_max, coeffs.spin, c_hat, 1)


def average_cl(ensemble: CoefficientEnsemble) -> SpectrumEstimate:
    """Ensemble-mean spectrum estimate."""
    big_l = ensemble.l_max
    amp2 = ensemble.spectrum.c_l
    c_hat = np.zeros(big_l + 1)
    power = np.abs(ensemble.z_stack) ** 2  # unit-variance draws
    for l in range(big_l + 1):
        c_hat[l] = amp2[l] * power[:, l * l : (l + 1) ** 2].mean()
    return SpectrumEstimate(big_l, ensemble.spectrum.spin, c_hat, ensemble.n_realizations)


def _node_index(grid, t: SpherePoint, tol=1e-12):
    j = np.argmin(np.abs(grid.theta_nodes - t.theta))
    k = np.argmin(np.abs(grid.phi_nodes - t.phi))
    if abs(grid.theta_nodes[j] - t.theta) > tol or abs(grid.phi_nodes[k] - t.phi) > tol:
        raise GridLookupError(
            f"point (theta={t.theta!r}, phi={t.phi!r}) is not a grid node"
        )
    return int(j), int(k)


@dataclass
class EmpiricalCovariance:
    values: np.ndarray      # complex, one per point pair
    stderr: np.ndarray      # Monte-Carlo standard error of each mean
    n_realizations: int


def empirical_covariance(maps, pairs) -> EmpiricalCovariance:
    """Sample mean of X(t1) conj(X(t2)) across realizations, per point pair.

    Points must coincide with grid nodes of the (shared) map grid.
    """
    maps = list(maps)
    if len(maps) < 2:
        raise SampleSizeError("need at least 2 realizations for a covariance")
    grid = maps[0].grid
    idx = [( _node_index(grid, t1), _node_index(grid, t2)) for (t1, t2) in pairs]
    stack = np.stack([m.values for m in maps])
    vals = np.empty(len(idx), dtype=complex)
    errs = np.empty(len(idx))
    for p, ((j1, k1), (j2, k2)) in enumerate(idx):
        prod = stack[:, j1, k1] * np.conj(stack[:, j2, k2])
        vals[p] = prod.mean()
        n = prod.shape[0]
        errs[p] = math.sqrt(
            (np.abs(prod - prod.mean()) ** 2).mean() / (n - 1)
        )
    return EmpiricalCovariance(vals, errs, len(maps))


# ---------------------------------------------------------------------------
# Coefficient diagnostics
# ---------------------------------------------------------------------------

@dataclass
class DiagnosticsConfig:
    """Thresholds in Monte-Carlo standard errors (quantile band for the
    Cauchy check); family-wise calibrated for N around 2000."""

    mean_sigma: float = 4.0
    variance_sigma: float = 4.0
    correlation_sigma: float = 4.0
    re_im_sigma: float = 4.0
    cauchy_band: float = 0.15
    kurtosis_sigma: float = 6.0
    min_realizations: int = 100


@dataclass
class CheckResult:
    label: str        # letter a..g
    name: str
    statistic: float  # worst observed value
    threshold: float
    passed: bool
    detail: str = ""


@dataclass
class DiagnosticsReport:
    checks: list
    n_realizations: int
    per_coefficient: dict = field(default_factory=dict)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, label: str) -> CheckResult:
        for c in self.checks:
            if c.label == label:
                return c
        raise KeyError(label)

    def to_text(self) -> str:
        lines = [f"coefficient diagnostics over N = {self.n_realizations} realizations"]
        for c in self.checks:
            state = "pass" if c.passed else "FAIL"
            lines.append(
                f"  ({c.label}) {c.name:<24s} stat={c.statistic:12.5e} "
                f"thresh={c.threshold:12.5e}  {state}  {c.detail}"
            )
        return "\n".join(lines)

    def machine_lines(self):
        """One 'check name, statistic, threshold, pass|fail' line per check."""
        return [
            f"{c.name}, {c.statistic:.6e}, {c.threshold:.6e}, "
            + ("pass" if c.passed else "fail")
            for c in self.checks
        ]


def _free_columns(ensemble):
    """Flat indices of independently drawn coefficients with nonzero power."""
    big_l = ensemble.l_max
    spec = ensemble.spectrum
    cols, meta = [], []
    for l in range(big_l + 1):
        if l < abs(spec.spin):
            continue
        mrange = range(0, l + 1) if ensemble.symmetry is Symmetry.CONJUGATE_SYMMETRIC \
            else range(-l, l + 1)
        for m in mrange:
            cols.append(lm_index(l, m))
            meta.append((l, m))
    return np.array(cols, dtype=int), meta


def coefficient_diagnostics(ensemble: CoefficientEnsemble,
                            config: DiagnosticsConfig | None = None) -> DiagnosticsReport:
    """Run the moment/symmetry/law battery (checks (a) through (g)).

    Cross-moment checks (c) run over the free coefficient set: in symmetric
    mode the m < 0 entries are deterministic conjugates of the m > 0 ones
    (their plain product with the partner is forced to modulus one), so only
    independently drawn coefficients are compared. Checks (e), (f) and the
    complex-margin parts of (g) cover m > 0; the m = 0 entries are
    self-conjugate with a single variance-1 margin, covered by (b) and (g).
    """
    cfg = config or DiagnosticsConfig()
    n = ensemble.n_realizations
    if n < cfg.min_realizations:
        raise SampleSizeError(
            f"need at least {cfg.min_realizations} realizations, got {n}"
        )
    symmetric = ensemble.symmetry is Symmetry.CONJUGATE_SYMMETRIC
    big_l = ensemble.l_max
    cols, meta = _free_columns(ensemble)
    z = ensemble.z_stack[:, cols]  # (n, n_free)
    root_n = math.sqrt(n)
    checks = []

    # (a) zero mean
    means = z.mean(axis=0)
    stat = float(np.abs(means).max())
    thr = cfg.mean_sigma / root_n
    checks.append(CheckResult("a", "zero_mean", stat, thr, stat <= thr))

    # (b) unit variance
    variances = (np.abs(z - means) ** 2).mean(axis=0)
    stat = float(np.abs(variances - 1.0).max())
    thr = cfg.variance_sigma * math.sqrt(2.0 / n)
    checks.append(CheckResult("b", "unit_variance", stat, thr, stat <= thr))

    # (c) pairwise cross-moments over the free set
    zc = z - means
    herm = (zc.conj().T @ zc) / n
    plain = (zc.T @ zc) / n
    scale = np.sqrt(np.outer(variances, variances))
    scale = np.where(scale > 0.0, scale, 1.0)  # degenerate columns fail (b) instead
    off = ~np.eye(len(cols), dtype=bool)
    stat_h = float((np.abs(herm) / scale)[off].max())
    stat_p = float((np.abs(plain) / scale)[off].max())
    # same-coefficient plain product E(Z^2) also vanishes for complex slots
    stat = max(stat_h, stat_p)
    thr = cfg.correlation_sigma / root_n
    checks.append(CheckResult(
        "c", "cross_correlation", stat, thr, stat <= thr,
        detail=f"hermitian {stat_h:.3e}, plain {stat_p:.3e}",
    ))

    # (d) conjugation symmetry residual
    if symmetric:
        resid = 0.0
        full = ensemble.z_stack
        for l in range(big_l + 1):
            if l < abs(ensemble.spectrum.spin):
                continue
            for m in range(0, l + 1):
                lhs = np.conj(full[:, lm_index(l, m)])
                rhs = (-1.0) ** ((l - m) % 2) * full[:, lm_index(l, -m)]
                resid = max(resid, float(np.abs(lhs - rhs).max()))
        checks.append(CheckResult("d", "conjugation_symmetry", resid, 0.0, resid == 0.0))
    else:
        checks.append(CheckResult(
            "d", "conjugation_symmetry", 0.0, 0.0, True,
            detail="not applicable (unconstrained ensemble)",
        ))

    # (e) Re/Im variance 1/2 each and no mutual correlation, m > 0
    pos = [k for k, (l, m) in enumerate(meta) if m > 0]
    if pos:
        re = zc[:, pos].real
        im = zc[:, pos].imag
        var_re = (re**2).mean(axis=0)
        var_im = (im**2).mean(axis=0)
        stat_v = float(max(np.abs(var_re - 0.5).max(), np.abs(var_im - 0.5).max()))
        thr_v = cfg.re_im_sigma * math.sqrt(2.0 / n) / 2.0
        denom = np.sqrt(var_re * var_im)
        corr = (re * im).mean(axis=0) / np.where(denom > 0.0, denom, 1.0)
        stat_c = float(np.abs(corr).max())
        thr_c = cfg.re_im_sigma / root_n
        ok = stat_v <= thr_v and stat_c <= thr_c
        checks.append(CheckResult(
            "e", "re_im_moments", stat_v, thr_v, ok,
            detail=f"var dev {stat_v:.3e} (thr {thr_v:.3e}), corr {stat_c:.3e} (thr {thr_c:.3e})",
        ))

        # (f) Cauchy ratio: median of |Re/Im| near 1 (quantile check; the
        # ratio has no moments)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(re / im)
        med = np.median(ratio, axis=0)
        stat = float(np.abs(med - 1.0).max())
        checks.append(CheckResult(
            "f", "cauchy_ratio_median", stat, cfg.cauchy_band, stat <= cfg.cauchy_band
        ))
    else:
        checks.append(CheckResult("e", "re_im_moments", 0.0, 0.0, True, "no m > 0 slots"))
        checks.append(CheckResult("f", "cauchy_ratio_median", 0.0, 0.0, True, "no m > 0 slots"))

    # (g) normality of the real margins (excess kurtosis, scale-invariant)
    margins = []
    for k, (l, m) in enumerate(meta):
        if m != 0 or not symmetric:
            margins.append(zc[:, k].real)
            margins.append(zc[:, k].imag)
        else:
            col = zc[:, k]
            margins.append(col.real if l % 2 == 0 else col.imag)
    margins = np.stack(margins)
    m2 = (margins**2).mean(axis=1)
    m4 = (margins**4).mean(axis=1)
    excess = m4 / np.where(m2 > 0.0, m2**2, 1.0) - 3.0
    stat = float(np.abs(excess).max())
    thr = cfg.kurtosis_sigma * math.sqrt(24.0 / n)
    checks.append(CheckResult(
        "g", "normality_kurtosis", stat, thr, stat <= thr,
        detail="per-margin excess kurtosis",
    ))

    report = DiagnosticsReport(checks, n)
    report.per_coefficient = {
        "columns": meta,
        "mean": means,
        "variance": variances,
    }
    return report
