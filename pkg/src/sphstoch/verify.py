"""The verification battery behind `sphstoch verify` and the acceptance tests.

Eleven independent checks, each with its tolerance pinned here:

 1. fast Wigner-d recursion against the exact differential oracle
 2. addition formula / unitary variant / matrix multiplicativity
 3. the quarter-turn phase relation between the two function families
 4. orthogonality of the D-functions over the rotation group by quadrature
 5. analyze(synthesize) round trips for spins -2..2
 6. the e^(i s phi2) factorization of the group-domain lift
 7. the coefficient-law diagnostics, contrasting the two generators
 8. recovery of a flat input spectrum from an ensemble
 9. ensemble covariance against the closed-form series
10. invariance of the spectrum estimator under per-degree rotations
11. byte-identical outputs across seeds repeats and worker counts

Everything is deterministic: Monte-Carlo checks use fixed seeds.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .estimate import average_cl, coefficient_diagnostics, empirical_covariance, estimate_cl
from .fields import (
    FieldModel,
    GeneratorKind,
    PowerSpectrum,
    Symmetry,
    covariance_series,
    lift_to_SO3,
    point_frame,
    sample_ensemble,
    synthesize_field,
)
from .harmonics import TriangularCoefficients, analyze, build_grid, synthesize
from .rotations import (
    Convention,
    EulerAngles,
    SpherePoint,
    compose,
    convert_convention,
    inverse,
    rotation_matrix,
)
from .wigner import (
    phase_i,
    rodrigues_P,
    so3_orthogonality,
    wigner_d,
    wigner_matrix_stack,
)

DEFAULT_SEED = 20240817

_I_POWERS = np.array([1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j])


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    artifacts: dict | None = None

    def line(self) -> str:
        state = "PASS" if self.passed else "FAIL"
        return f"[{state}] criterion {self.number:2d} {self.name}: {self.detail}"


def _random_angles(rng, convention=Convention.ZXZ):
    return EulerAngles(
        rng.uniform(0.0, 2.0 * math.pi),
        rng.uniform(0.05, math.pi - 0.05),
        rng.uniform(0.0, 2.0 * math.pi),
        convention,
    )


def criterion_1() -> CriterionResult:
    """Recursion vs Rodrigues oracle, l <= 10, 50 theta nodes, all (m, n)."""
    thetas = np.linspace(0.0, math.pi, 50)
    worst = 0.0
    for l in range(11):
        for m in range(-l, l + 1):
            for n in range(-l, l + 1):
                for theta in thetas:
                    oracle = phase_i(m - n) * rodrigues_P(l, m, n, math.cos(theta))
                    err = abs(wigner_d(l, m, n, theta) - oracle.real)
                    err = max(err, abs(oracle.imag))
                    if err > worst:
                        worst = err
    tol = 1e-12
    return CriterionResult(
        1, "wigner_oracle_agreement", worst <= tol, f"max abs error {worst:.3e} (tol {tol:.0e})"
    )


def criterion_2(n_pairs: int = 100, l_max: int = 32, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Addition formula, conjugate-transpose variant, matrix multiplicativity."""
    rng = np.random.default_rng(seed)
    tol = 1e-10
    worst = 0.0
    for _ in range(n_pairs):
        g1 = _random_angles(rng)
        g2 = _random_angles(rng)
        s1 = wigner_matrix_stack(l_max, g1)
        s2 = wigner_matrix_stack(l_max, g2)
        s12 = wigner_matrix_stack(l_max, compose(g1, g2))
        sdiff = wigner_matrix_stack(l_max, compose(g1, inverse(g2)))
        for l in range(l_max + 1):
            worst = max(worst, float(np.abs(s1[l] @ s2[l] - s12[l]).max()))
            worst = max(worst, float(np.abs(s1[l] @ s2[l].conj().T - sdiff[l]).max()))
        if worst > tol:
            return CriterionResult(
                2, "representation_identities", False,
                f"residual {worst:.3e} exceeds {tol:.0e}",
            )
    return CriterionResult(
        2, "representation_identities", True,
        f"max residual {worst:.3e} over {n_pairs} pairs, l<={l_max} (tol {tol:.0e})",
    )


def criterion_3(l_max: int = 16, n_samples: int = 30, seed: int = DEFAULT_SEED) -> CriterionResult:
    """D = (-i)^(n-m) T at equal angle triples, plus conversion consistency."""
    rng = np.random.default_rng(seed + 3)
    tol = 1e-12
    worst = 0.0
    for _ in range(n_samples):
        g_zyz = _random_angles(rng, Convention.ZYZ)
        g_zxz_same = EulerAngles(g_zyz.phi1, g_zyz.theta, g_zyz.phi2, Convention.ZXZ)
        g_conv = convert_convention(g_zyz, Convention.ZXZ)
        worst = max(
            worst,
            float(np.abs(rotation_matrix(g_conv) - rotation_matrix(g_zyz)).max()),
        )
        d_stack = wigner_matrix_stack(l_max, g_zyz)
        t_stack = wigner_matrix_stack(l_max, g_zxz_same)
        tc_stack = wigner_matrix_stack(l_max, g_conv)
        for l in range(l_max + 1):
            sub = np.arange(-l, l + 1)
            diff = np.subtract.outer(sub, sub)  # diff[m, n] = m - n
            phases = _I_POWERS[diff % 4]        # i^(m-n) = (-i)^(n-m)
            worst = max(worst, float(np.abs(d_stack[l] - phases * t_stack[l]).max()))
            # same group element: T(g) = (-1)^(n-m) D(g) after conversion
            signs = (-1.0) ** (np.abs(diff) % 2)
            worst = max(worst, float(np.abs(tc_stack[l] - signs * d_stack[l]).max()))
    return CriterionResult(
        3, "phase_relation", worst <= tol, f"max residual {worst:.3e} (tol {tol:.0e})"
    )


def criterion_4(l_max: int = 8) -> CriterionResult:
    """Group orthogonality: diagonal 8 pi^2/(2l+1), off-diagonal zero."""
    gram, expected = so3_orthogonality(l_max)
    worst = float(np.abs(gram - expected).max())
    tol = 1e-8
    return CriterionResult(
        4, "so3_orthogonality", worst <= tol,
        f"max deviation {worst:.3e} for l,l'<={l_max} (tol {tol:.0e})",
    )


def criterion_5(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Transform round trip, spins -2..2, l_max in {4, 16, 32}."""
    rng = np.random.default_rng(seed + 5)
    tol = 1e-9
    worst = 0.0
    for l_max in (4, 16, 32):
        grid = build_grid(l_max)
        for spin in (-2, -1, 0, 1, 2):
            coeffs = TriangularCoefficients(l_max, spin)
            for l in range(abs(spin), l_max + 1):
                for m in range(-l, l + 1):
                    coeffs.set(l, m, complex(rng.normal(), rng.normal()))
            back = analyze(synthesize(coeffs, grid), l_max)
            scale = float(np.abs(coeffs.values).max())
            rel = float(np.abs(back.values - coeffs.values).max()) / scale
            worst = max(worst, rel)
    return CriterionResult(
        5, "transform_round_trip", worst <= tol,
        f"max relative error {worst:.3e} (tol {tol:.0e})",
    )


def criterion_6(seed: int = DEFAULT_SEED) -> CriterionResult:
    """e^(2 i phi2) factor of the spin-2 lift; phi2-independence at spin 0."""
    rng = np.random.default_rng(seed + 6)
    l_max = 8
    tol2, tol0 = 1e-10, 1e-12
    worst2 = worst0 = 0.0
    coeffs2 = TriangularCoefficients(l_max, 2)
    coeffs0 = TriangularCoefficients(l_max, 0)
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            if l >= 2:
                coeffs2.set(l, m, complex(rng.normal(), rng.normal()))
            coeffs0.set(l, m, complex(rng.normal(), rng.normal()))
    for _ in range(25):
        phi1 = rng.uniform(0.0, 2.0 * math.pi)
        theta = rng.uniform(0.05, math.pi - 0.05)
        phi2 = rng.uniform(0.0, 2.0 * math.pi)
        g = EulerAngles(phi1, theta, phi2, Convention.ZXZ)
        g0 = EulerAngles(phi1, theta, 0.0, Convention.ZXZ)
        a_full = lift_to_SO3(coeffs2, g)
        a_slice = lift_to_SO3(coeffs2, g0)
        worst2 = max(worst2, abs(a_full - np.exp(2j * phi2) * a_slice))
        worst0 = max(worst0, abs(lift_to_SO3(coeffs0, g) - lift_to_SO3(coeffs0, g0)))
    ok = worst2 <= tol2 and worst0 <= tol0
    return CriterionResult(
        6, "spin_factorization", ok,
        f"spin2 residual {worst2:.3e} (tol {tol2:.0e}), spin0 {worst0:.3e} (tol {tol0:.0e})",
    )


def _gaussian_ensemble(n_realizations, seed, l_max=16):
    model = FieldModel(
        PowerSpectrum.flat(l_max, 0),
        seed=seed,
        generator=GeneratorKind.GAUSSIAN,
        symmetry=Symmetry.CONJUGATE_SYMMETRIC,
    )
    return sample_ensemble(model, n_realizations)


def criterion_7(n_realizations: int = 2000, seed: int = DEFAULT_SEED,
                _shared=None) -> CriterionResult:
    """Diagnostics (a)-(g): Gaussian passes all; fixed-modulus fails only (g)."""
    gauss = _shared if _shared is not None else _gaussian_ensemble(n_realizations, seed)
    rep_g = coefficient_diagnostics(gauss)
    model_fm = FieldModel(
        PowerSpectrum.flat(16, 0),
        seed=seed + 1,
        generator=GeneratorKind.FIXED_MODULUS,
        symmetry=Symmetry.CONJUGATE_SYMMETRIC,
    )
    rep_f = coefficient_diagnostics(sample_ensemble(model_fm, n_realizations))
    ok_gauss = rep_g.all_passed
    abcde = all(rep_f.check(label).passed for label in "abcde")
    g_flags = not rep_f.check("g").passed
    ok = ok_gauss and abcde and g_flags
    detail = (
        f"gaussian: {'all pass' if ok_gauss else 'FAILED ' + str([c.label for c in rep_g.checks if not c.passed])}; "
        f"fixed-modulus: (a)-(e) {'pass' if abcde else 'FAIL'}, "
        f"(g) {'fails as required' if g_flags else 'unexpectedly passes'} "
        f"(kurtosis stat {rep_f.check('g').statistic:.2f})"
    )
    return CriterionResult(
        7, "coefficient_diagnostics", ok, detail,
        artifacts={"gaussian": rep_g, "fixed-modulus": rep_f},
    )


def criterion_8(n_realizations: int = 2000, seed: int = DEFAULT_SEED,
                _shared=None) -> CriterionResult:
    """Flat C_l = 1 recovery: mean estimate within 3 sqrt(2/((2l+1)N))."""
    gauss = _shared if _shared is not None else _gaussian_ensemble(n_realizations, seed)
    est = average_cl(gauss)
    n = est.n_realizations
    ls = np.arange(est.l_max + 1)
    bands = 3.0 * np.sqrt(2.0 / ((2 * ls + 1) * n))
    dev = np.abs(est.c_hat_l - 1.0)
    ok = bool(np.all(dev <= bands))
    worst = int(np.argmax(dev / bands))
    return CriterionResult(
        8, "spectrum_recovery", ok,
        f"worst deviation {dev[worst]:.4f} vs band {bands[worst]:.4f} at l={worst}",
    )


def criterion_9(n_realizations: int = 2000, seed: int = DEFAULT_SEED) -> CriterionResult:
    """Ensemble covariance against the closed-form series, 5 separations."""
    l_max = 16
    grid = build_grid(l_max)
    details = []
    ok = True
    for spin in (0, 2):
        spectrum = PowerSpectrum.flat(l_max, spin)
        model = FieldModel(
            spectrum, seed=seed + 90 + spin,
            generator=GeneratorKind.GAUSSIAN,
            symmetry=Symmetry.UNCONSTRAINED_COMPLEX,
        )
        maps = [
            synthesize_field(model, grid, realization=r) for r in range(n_realizations)
        ]
        j0, k0 = grid.n_theta // 2, 0
        t1 = SpherePoint(grid.theta_nodes[j0], grid.phi_nodes[k0])
        pairs = []
        for j, k in [(j0, 0), (j0, 3), (j0 + 2, 6), (j0 - 4, 12), (2, 20)]:
            pairs.append((t1, SpherePoint(grid.theta_nodes[j], grid.phi_nodes[k])))
        emp = empirical_covariance(maps, pairs)
        worst_ratio = 0.0
        for p, (ta, tb) in enumerate(pairs):
            g12 = compose(inverse(point_frame(ta)), point_frame(tb))
            ref = covariance_series(spectrum, g12)
            ratio = abs(emp.values[p] - ref) / (3.0 * emp.stderr[p])
            worst_ratio = max(worst_ratio, ratio)
        ok = ok and worst_ratio <= 1.0
        details.append(f"spin {spin}: worst |emp-series|/(3 SE) = {worst_ratio:.2f}")
    return CriterionResult(9, "covariance_consistency", ok, "; ".join(details))


def criterion_10(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Per-degree unitary rotation leaves the spectrum estimate unchanged."""
    rng = np.random.default_rng(seed + 10)
    l_max = 16
    tol = 1e-10
    coeffs = TriangularCoefficients(l_max, 0)
    for l in range(l_max + 1):
        for m in range(-l, l + 1):
            coeffs.set(l, m, complex(rng.normal(), rng.normal()))
    base = estimate_cl(coeffs).c_hat_l
    worst = 0.0
    for _ in range(5):
        stack = wigner_matrix_stack(l_max, _random_angles(rng))
        rotated = coeffs.copy()
        for l in range(l_max + 1):
            block = coeffs.values[l * l : (l + 1) ** 2]
            rotated.values[l * l : (l + 1) ** 2] = stack[l] @ block
        dev = np.abs(estimate_cl(rotated).c_hat_l - base)
        worst = max(worst, float(dev.max()))
    return CriterionResult(
        10, "spectrum_rotation_invariance", worst <= tol,
        f"max |delta C_hat_l| = {worst:.3e} (tol {tol:.0e})",
    )


def criterion_11(seed: int = DEFAULT_SEED) -> CriterionResult:
    """Identical seeds give byte-identical synth output for any worker count."""
    from . import cli as _cli_module  # local import: cli itself imports verify

    workers_hi = max(2, os.cpu_count() or 2)
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for tag, workers in (("a", 1), ("b", 1), ("c", workers_hi)):
            out = os.path.join(tmp, f"map_{tag}.sfm")
            code = _cli_module.main([
                "synth", "--lmax", "16", "--spin", "2", "--seed", str(seed),
                "--out", out, "--workers", str(workers), "--quiet",
            ])
            if code != 0:
                return CriterionResult(11, "determinism", False, f"synth exited {code}")
            with open(out, "rb") as handle:
                outs.append(handle.read())
            with open(out + ".sfc", "rb") as handle:
                outs[-1] += handle.read()
        repeat_ok = outs[0] == outs[1]
        workers_ok = outs[0] == outs[2]
    ok = repeat_ok and workers_ok
    return CriterionResult(
        11, "determinism", ok,
        f"repeat identical: {repeat_ok}; workers 1 vs {workers_hi} identical: {workers_ok}",
    )


def run_all(n_realizations: int = 2000, seed: int = DEFAULT_SEED):
    """Run the full battery; Monte-Carlo ensembles are shared where possible."""
    shared = _gaussian_ensemble(n_realizations, seed)
    return [
        criterion_1(),
        criterion_2(seed=seed),
        criterion_3(seed=seed),
        criterion_4(),
        criterion_5(seed=seed),
        criterion_6(seed=seed),
        criterion_7(n_realizations, seed, _shared=shared),
        criterion_8(n_realizations, seed, _shared=shared),
        criterion_9(n_realizations, seed),
        criterion_10(seed=seed),
        criterion_11(seed=seed),
    ]
