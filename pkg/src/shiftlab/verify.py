"""Self-verification suites for the command-line ``verify`` subcommand.

Each suite runs a seeded batch of property checks and reports the worst
observed residual against its tolerance.  ``tol_scale`` multiplies every
tolerance: values below 1 tighten the suites (``--tol-scale 1e-4`` is the
documented expected-failure demonstration), values above loosen them.
The step map is injectable so that deliberately broken variants can be
shown to trip the right suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shiftlab import dynamics
from shiftlab.diagnostics import HeightSpec, height, iterate, parlett_check
from shiftlab.emit import render_csv
from shiftlab.errors import ShiftLabError
from shiftlab.factor import qr_plain, qr_star, rq_star
from shiftlab.geometry import classify_spectrum, project, random_base, tubular_inverse
from shiftlab.lanczos import random_jacobi
from shiftlab.oracle import dense_eig_oracle, gram_schmidt_qr_star
from shiftlab.strategies import Strategy, axiom_check
from shiftlab.tridiag import SignMatrix, SymTridiag


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}"


def _rng(seed, stream):
    key = np.array([seed & (2**64 - 1), stream & (2**64 - 1)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _random_spectrum(rng, n):
    lam = np.sort(rng.normal(size=n) * 2.0)
    while np.min(np.diff(lam)) < 0.05:
        lam = np.sort(rng.normal(size=n) * 2.0)
    return lam


def _random_matrix(rng, n=None):
    n = int(n or rng.integers(2, 9))
    return random_jacobi(_random_spectrum(rng, n), rng)


def suite_reconstruction(seed=0, tol_scale=1.0, step_fn=None, trials=120):
    worst = 0.0
    rng = _rng(seed, 1)
    for _ in range(trials):
        T = _random_matrix(rng)
        s = float(rng.normal())
        M = T.dense() - s * np.eye(T.n)
        tol = 1e-12 * (1.0 + T.norm()) * tol_scale
        Q, R = qr_star(T, s)
        worst = max(worst, float(np.max(np.abs(Q.dense() @ R.dense() - M))) / tol)
        Rr, Qr = rq_star(T, s)
        worst = max(worst, float(np.max(np.abs(Rr.dense() @ Qr.dense() - M))) / tol)
    return SuiteResult("reconstruction", worst <= 1.0, f"worst residual ratio {worst:.3e}")


def suite_sign_conventions(seed=0, tol_scale=1.0, step_fn=None, trials=120):
    rng = _rng(seed, 2)
    ok = True
    worst = 0.0
    for _ in range(trials):
        T = _random_matrix(rng)
        s = float(rng.normal())
        Q, R = qr_star(T, s)
        ok = ok and R.star_convention_ok()
        Qd = Q.dense()
        worst = max(worst, float(np.max(np.abs(Qd.T @ Qd - np.eye(T.n)))) / (1e-12 * tol_scale))
        worst = max(worst, abs(float(np.linalg.det(Qd)) - 1.0) / (1e-12 * tol_scale))
        try:
            _Qp, Rp = qr_plain(T, s)
            ok = ok and Rp.plain_convention_ok()
        except ShiftLabError:
            pass
    return SuiteResult(
        "sign_conventions", ok and worst <= 1.0, f"conventions {ok}, worst ratio {worst:.3e}"
    )


def suite_oracle_equivalence(seed=0, tol_scale=1.0, step_fn=None, trials=100):
    rng = _rng(seed, 3)
    worst = 0.0
    for _ in range(trials):
        T = _random_matrix(rng)
        s = float(rng.normal())
        Q, R = qr_star(T, s)
        Qg, Rg = gram_schmidt_qr_star(T.dense() - s * np.eye(T.n))
        err = max(
            float(np.max(np.abs(Q.dense() - Qg))),
            float(np.max(np.abs(R.dense() - Rg))),
        )
        worst = max(worst, err / (1e-11 * tol_scale))
    return SuiteResult("oracle_equivalence", worst <= 1.0, f"worst ratio {worst:.3e}")


def suite_isospectrality(seed=0, tol_scale=1.0, step_fn=None, trials=100):
    step_fn = step_fn or dynamics.step
    rng = _rng(seed, 4)
    worst = 0.0
    for _ in range(trials):
        T = _random_matrix(rng)
        s = float(rng.normal())
        lam0 = dense_eig_oracle(T.dense())[0]
        lam1 = dense_eig_oracle(step_fn(T, s).dense())[0]
        worst = max(worst, float(np.max(np.abs(lam1 - lam0))) / (1e-10 * T.norm() * tol_scale))
    return SuiteResult("isospectrality", worst <= 1.0, f"worst drift ratio {worst:.3e}")


def suite_deflation(seed=0, tol_scale=1.0, step_fn=None, trials=60):
    step_fn = step_fn or dynamics.step
    rng = _rng(seed, 5)
    worst = 0.0
    for _ in range(trials):
        T = _random_matrix(rng)
        lam = dense_eig_oracle(T.dense())[0]
        i = int(rng.integers(T.n))
        S = step_fn(T, float(lam[i]))
        tol = 1e-10 * T.norm() * tol_scale
        worst = max(worst, abs(S.b1) / tol, abs(S.corner - lam[i]) / tol)
    return SuiteResult("one_step_deflation", worst <= 1.0, f"worst ratio {worst:.3e}")


def suite_equivariance(seed=0, tol_scale=1.0, step_fn=None, trials=40):
    step_fn = step_fn or dynamics.step
    rng = _rng(seed, 6)
    worst = 0.0
    axiom_worst = 0.0
    strategies = [Strategy("rayleigh"), Strategy("wilkinson"), Strategy("mixed", epsilon=0.05)]
    for _ in range(trials):
        T = _random_matrix(rng, n=int(rng.integers(2, 6)))
        for strat in strategies:
            for E in SignMatrix.all_patterns(T.n):
                TE = E.conjugate(T)
                lhs = step_fn(TE, strat.shift(TE))
                rhs = E.conjugate(step_fn(T, strat.shift(T)))
                worst = max(worst, lhs.distance(rhs) / (1e-12 * (1 + T.norm()) * tol_scale))
            res, _ = axiom_check(T, strat, dense_eig_oracle(T.dense())[0])
            axiom_worst = max(axiom_worst, res / (1e-13 * tol_scale))
    passed = worst <= 1.0 and axiom_worst <= 1.0
    return SuiteResult(
        "equivariance", passed, f"conjugation ratio {worst:.3e}, flip residual ratio {axiom_worst:.3e}"
    )


def suite_commutation(seed=0, tol_scale=1.0, step_fn=None, trials=80):
    step_fn = step_fn or dynamics.step
    rng = _rng(seed, 7)
    worst_c = 0.0
    worst_i = 0.0
    for _ in range(trials):
        T = _random_matrix(rng)
        s0, s1 = float(rng.normal()), float(rng.normal())
        ab = step_fn(step_fn(T, s0), s1)
        ba = step_fn(step_fn(T, s1), s0)
        worst_c = max(worst_c, ab.distance(ba) / (1e-9 * T.norm() * tol_scale))
        inv = dynamics.step_inverse(T, s0)
        worst_i = max(worst_i, step_fn(inv, s0).distance(T) / (1e-10 * T.norm() * tol_scale))
    passed = worst_c <= 1.0 and worst_i <= 1.0
    return SuiteResult(
        "commutation_inversion", passed, f"commute ratio {worst_c:.3e}, invert ratio {worst_i:.3e}"
    )


def suite_wilkinson_axiom(seed=0, tol_scale=1.0, step_fn=None, trials=200):
    rng = _rng(seed, 8)
    strat = Strategy("wilkinson")
    worst_margin = -math.inf
    worst_det = 0.0
    for _ in range(trials):
        T = _random_matrix(rng)
        lam = dense_eig_oracle(T.dense())[0]
        _res, margin = axiom_check(T, strat, lam)
        worst_margin = max(worst_margin, margin / (1e-12 * tol_scale) if margin > 0 else margin)
        a, b, c = T.trailing_minor()
        w = strat.shift(T)
        det = abs((a - w) * (c - w) - b * b)
        minor_norm_sq = a * a + 2 * b * b + c * c
        worst_det = max(worst_det, det / (1e-12 * minor_norm_sq * tol_scale))
    draw = Strategy("wilkinson").shift(SymTridiag([9.0, 0.5, 0.5], [0.0, 2.0]))
    draw_ok = abs(draw - (0.5 - 2.0)) <= 1e-13
    passed = worst_margin <= 1.0 and worst_det <= 1.0 and draw_ok
    return SuiteResult(
        "wilkinson_axiom",
        passed,
        f"margin ratio {worst_margin:.3e}, minor-eigenvalue ratio {worst_det:.3e}, draw {draw_ok}",
    )


def suite_parlett(seed=0, tol_scale=1.0, step_fn=None, trials=40):
    rng = _rng(seed, 9)
    worst = -math.inf
    for _ in range(trials):
        n = int(rng.integers(3, 9))
        T0 = _random_matrix(rng, n=n)
        trace = iterate(T0, Strategy("wilkinson"), max_steps=40)
        worst = max(worst, parlett_check(trace, T0))
    return SuiteResult("parlett_bound", worst <= 1e-12 * tol_scale, f"worst slack {worst:.3e}")


def suite_projection(seed=0, tol_scale=1.0, step_fn=None, trials=12):
    rng = _rng(seed, 10)
    info = classify_spectrum(_random_spectrum(rng, 4))
    worst_idem = 0.0
    worst_comm = 0.0
    sandwich_ok = True
    for _ in range(trials):
        i = int(rng.integers(info.n))
        base = random_base(info, i, rng)
        T = tubular_inverse(base, float(rng.uniform(0.002, 0.02)) * info.gap, i, info)
        P1 = project(T, i, info)
        worst_idem = max(worst_idem, project(P1, i, info).distance(P1) / (1e-9 * tol_scale))
        s = float(np.max(np.asarray(info.lam))) + 0.7  # never an eigenvalue
        lhs = project(dynamics.step(T, s), i, info)
        rhs = dynamics.step(P1, s)
        worst_comm = max(worst_comm, lhs.distance(rhs) / (1e-9 * tol_scale))
        sandwich_ok = sandwich_ok and abs(T.b1) <= T.distance(P1) + 1e-14
    passed = worst_idem <= 1.0 and worst_comm <= 1.0 and sandwich_ok
    return SuiteResult(
        "projection",
        passed,
        f"idempotence ratio {worst_idem:.3e}, commutation ratio {worst_comm:.3e}, sandwich {sandwich_ok}",
    )


def suite_height(seed=0, tol_scale=1.0, step_fn=None, trials=6):
    step_fn = step_fn or dynamics.step
    rng = _rng(seed, 11)
    info = classify_spectrum([1.0, 2.0, 4.0])
    strat = Strategy("wilkinson")
    ok = True
    worst = math.inf
    for _ in range(trials):
        i = int(rng.integers(3))
        base = random_base(info, i, rng)
        T = tubular_inverse(base, 0.02, i, info)
        spec = HeightSpec.default(3, i, 1e-4 * info.gap**2)
        h_prev = height(T, spec, info)
        for _k in range(6):
            T = step_fn(T, strat.shift(T))
            h_now = height(T, spec, info)
            delta = h_now - h_prev
            if T.offdiag_mass() > 1e-8:
                ok = ok and delta > 0
                worst = min(worst, delta)
            else:
                ok = ok and delta > -1e-12 * tol_scale
            h_prev = h_now
    return SuiteResult("height_monotonicity", ok, f"smallest strict increase {worst:.3e}")


def suite_determinism(seed=0, tol_scale=1.0, step_fn=None, trials=None):
    from shiftlab.experiments import TRACE_COLUMNS, run_rate_scan

    info = classify_spectrum([1.0, 2.0, 4.0])
    out = []
    for _ in range(2):
        scan = run_rate_scan(info, Strategy("wilkinson"), trials=5, max_steps=25,
                             deflate_tol=1e-14, seed=seed)
        out.append(render_csv(TRACE_COLUMNS, scan.rows))
    same = out[0] == out[1]
    return SuiteResult("determinism", same, f"identical bytes {same}")


ALL_SUITES = (
    suite_reconstruction,
    suite_sign_conventions,
    suite_oracle_equivalence,
    suite_isospectrality,
    suite_deflation,
    suite_equivariance,
    suite_commutation,
    suite_wilkinson_axiom,
    suite_parlett,
    suite_projection,
    suite_height,
    suite_determinism,
)


def run_all(seed=0, tol_scale=1.0, step_fn=None):
    return [suite(seed=seed, tol_scale=tol_scale, step_fn=step_fn) for suite in ALL_SUITES]
