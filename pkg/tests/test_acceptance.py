"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with its wall time
and budget; exceeding the budget counts as a failure.  Run with
``pytest tests/test_acceptance.py -v`` or directly as a script.
"""

import math
import time

import numpy as np
import pytest

from ultragabor import cli, grids as G, lab, reports, systems as S, testfunctions as T, timefreq as F
from ultragabor import weights as W
from ultragabor.config import load_suite
from ultragabor.verdict import Status

pytestmark = pytest.mark.acceptance


class Criterion:
    """Collects named checks and prints the verdict line on exit."""

    def __init__(self, number: int, budget: float, capsys=None):
        self.number, self.budget, self.capsys = number, budget, capsys
        self.failures: list[str] = []
        self.details: list[str] = []

    def check(self, ok: bool, what: str):
        (self.details if ok else self.failures).append(what)

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        if exc is not None:
            self.failures.append(f"{exc_type.__name__}: {exc}")
        if elapsed > self.budget:
            self.failures.append(f"over budget ({elapsed:.1f} s > {self.budget:g} s)")
        verdict = "FAIL" if self.failures else "PASS"
        line = f"criterion {self.number}: {verdict} ({elapsed:.1f} s of {self.budget:g} s)"
        if self.failures:
            line += "; " + "; ".join(self.failures)
        if self.capsys is not None:
            with self.capsys.disabled():
                print("\n" + line)
        else:
            print(line)
        assert not self.failures, line
        return False


def status(v) -> Status:
    return v.status


# -- 1 ------------------------------------------------------------------------


def test_criterion_01_sequence_battery(capsys):
    with Criterion(1, 30, capsys) as c:
        for s in (0.5, 1.0, 2.0):
            M = W.gevrey(s)
            c.check(W.check_M2(M).holds, f"(M.2) p!^{s:g}")
            c.check(W.check_M2star(M).holds, f"(M.2)* p!^{s:g}")
            nq = W.check_nonquasianalytic(M)
            c.check(nq.holds == (s > 1) and nq.status is not Status.INCONCLUSIVE, f"nonquasianalytic p!^{s:g}")
            c.check(W.check_omega_seq(M).status is Status.FAILS, f"(3.4) fails for p!^{s:g}")
        # log_power(2) needs a long tabulation before its quotients stop doubling
        for s, p_max in ((0.5, W.DEFAULT_PMAX), (1.0, W.DEFAULT_PMAX), (2.0, 10000)):
            M = W.log_power(s, p_max=p_max)
            c.check(W.check_omega_seq(M).holds, f"(3.4) holds for log(p+e)^({s:g}p)")


# -- 2 ------------------------------------------------------------------------


def brute_associated(M, t, P=200):
    p = np.arange(P + 1)
    lm = M.log_M(p)
    return np.max(p[None, :] * np.log(t)[:, None] - lm[None, :] + lm[0], axis=1).clip(min=0.0)


def test_criterion_02_associated_function(capsys):
    with Criterion(2, 10, capsys) as c:
        rng = np.random.default_rng(20240601)
        worst = 0.0
        for M in (W.gevrey(1), W.gevrey(2), W.log_power(1)):
            mu150 = math.exp(M.log_mu(np.array([150]))[0])
            t = rng.uniform(0.0, mu150, 100)
            worst = max(worst, float(np.abs(W.associated_function(M, t) - brute_associated(M, t)).max()))
        c.check(worst <= 1e-10, f"max deviation {worst:.2e}")
        fixed = float(W.associated_function(W.gevrey(1), np.array([2.5]))[0])
        c.check(abs(fixed - math.log(3.125)) <= 1e-12, f"omega at 2.5 = {fixed!r}")


# -- 3 ------------------------------------------------------------------------


def test_criterion_03_young_duality(capsys):
    with Criterion(3, 30, capsys) as c:
        battery = [W.power_weight(1), W.power_weight(2), W.log_power_weight(2), W.sequence_weight(W.gevrey(2))]
        for w in battery:
            x = np.linspace(0.0, min(8.0, 0.5 * w.x_max), 200)
            phi = w.phi(x)
            err = float(np.max(np.abs(W.biconjugate(w, x) - phi) / (1 + phi)))
            c.check(err <= 1e-6, f"{w.label}: {err:.1e}")


# -- 4 ------------------------------------------------------------------------


def test_criterion_04_agreement_matrix(capsys):
    with Criterion(4, 300, capsys) as c:
        seqs = [W.gevrey(0.5), W.gevrey(1), W.gevrey(2), W.log_power(1), W.exp_square(),
                W.tabulated(log_values=np.arange(0, 501.0) ** 3, label="exp(p^3)")]
        for M in seqs:
            V = S.build_from_weight_sequence(M)
            pairs = {
                "[N] vs (M.2)'": (W.check_M2prime(M), [S.check_N(V, d) for d in (S.BEURLING, S.ROUMIEU)]),
                "[sq] vs (M.2)": (W.check_M2(M), [S.check_square(V, d) for d in (S.BEURLING, S.ROUMIEU)]),
                "(ooOmega) vs (3.4)": (W.check_omega_seq(M), [S.check_ooOmega(V)]),
            }
            for name, (ref, others) in pairs.items():
                c.check(ref.status is not Status.INCONCLUSIVE, f"{M.label} {name}: reference inconclusive")
                c.check(all(o.status is ref.status for o in others),
                        f"{M.label} {name}: {ref.status.value} vs {[o.status.value for o in others]}")
        V = S.build_from_weight_function(W.power_weight(1))
        c.check(S.check_DN(V).holds, "V_omega (DN) holds")
        c.check(S.check_ooOmega(V).status is Status.FAILS, "V_omega (ooOmega) fails")


# -- 5 ------------------------------------------------------------------------


def test_criterion_05_grid_triangle(capsys):
    with Criterion(5, 300, capsys) as c:
        om = W.power_weight(1)
        beurling = [S.build_from_weight_function(W.power_weight(1)),
                    S.build_from_weight_function(W.power_weight(0.5)),
                    S.build_from_weight_sequence(W.gevrey(1)),
                    S.saturating_system(W.power_weight(1))]
        roumieu = [S.build_from_weight_function(W.power_weight(1)),
                   S.build_from_weight_sequence(W.gevrey(2)),
                   S.build_from_weight_sequence(W.log_power(1)),
                   S.constant_system()]
        for V in beurling:
            A = G.build_beurling_grid(om, V)
            got = [G.check_Q(A).status, G.check_wQ(A).status, S.check_DN(V).status]
            c.check(len(set(got)) == 1 and Status.INCONCLUSIVE not in got,
                    f"Beurling {V.label}: {[g.value for g in got]}")
        for V in roumieu:
            A = G.build_roumieu_grid(V, om)
            got = [G.check_Q(A).status, G.check_wQ(A).status, S.check_ooOmega(V).status]
            c.check(len(set(got)) == 1 and Status.INCONCLUSIVE not in got,
                    f"Roumieu {V.label}: {[g.value for g in got]}")
        A = G.build_beurling_grid(om, beurling[0])
        for K in (3, 4, 6):
            theta = (K - 2) / (K - 1)
            predicted = theta / (1 - theta)
            fitted = G.c_eps_profile(A, 1, 2, 1, K, 1)["fitted_exponent"]
            c.check(abs(fitted - predicted) <= 0.2 * predicted, f"K={K}: fitted {fitted:.3f} vs {predicted:.3f}")


# -- 6 ------------------------------------------------------------------------


def test_criterion_06_isometry(capsys):
    with Criterion(6, 60, capsys) as c:
        pairs = [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1), (2, 1), (0, 2), (2, 2), (3, 3)]
        for i, j in pairs:
            f, psi = T.hermite_window(i), T.hermite_window(j)
            ratio = F.stft_l2_norm(f, psi) ** 2 / (F.l2_norm(f) ** 2 * F.l2_norm(psi) ** 2)
            c.check(abs(ratio - 1) <= 1e-5, f"hermite({i}), hermite({j}): {ratio - 1:+.1e}")


# -- 7 ------------------------------------------------------------------------


def test_criterion_07_reconstruction(capsys):
    with Criterion(7, 120, capsys) as c:
        g = T.gaussian_window()
        grid = F.TimeFrequencyGrid()
        c.check(grid.tf_step == grid.xi_step == 1 / 64 and grid.radius == 4, "grid [-4, 4] at spacing 1/64")
        _, rep = F.reconstruct(g, g, g, grid)
        c.check(rep.residual <= 1e-6, f"gaussian triple {rep.residual:.1e}")
        _, rep = F.reconstruct(T.hermite_window(2), g, g, grid)
        c.check(rep.residual <= 1e-5, f"hermite(2) input {rep.residual:.1e}")


# -- 8 ------------------------------------------------------------------------


def test_criterion_08_christensen_pair(capsys):
    with Criterion(8, 120, capsys) as c:
        psi, gamma = T.christensen_window(), T.christensen_dual(1 / 3)
        x = np.linspace(-3, 3, 6001)
        pou = np.abs(sum(psi(x - k) for k in range(-6, 7)) - 1).max()
        c.check(pou <= 1e-12, f"partition of unity {pou:.1e}")
        wr = F.wexler_raz_check(psi, gamma, 1.0, 1 / 3, box=6, step=1 / 256).residual
        c.check(wr <= 1e-8, f"Wexler-Raz {wr:.1e}")
        rt = F.frame_roundtrip(T.gaussian_window(), psi, gamma, 1.0, 1 / 3, step=1 / 256).residual
        c.check(rt <= 1e-8, f"round trip {rt:.1e}")
        fp = F.fourier_pair_check(psi, gamma, 1.0, 1 / 3, box=6).residual
        c.check(fp <= 1e-5, f"Fourier pair {fp:.1e}")


# -- 9 ------------------------------------------------------------------------


def test_criterion_09_gaussian_dual(capsys):
    with Criterion(9, 180, capsys) as c:
        dual = F.gaussian_dual(0.5, 0.5)  # raises NotConverged if CG stalls
        c.check(dual.iterations < 500, f"CG converged in {dual.iterations} iterations")
        c.check(dual.wexler_raz.residual <= 1e-6, f"Wexler-Raz {dual.wexler_raz.residual:.1e}")
        spec = {s.identifier: s for s in load_suite()}["roundtrip_critical"]
        rep = lab.run_suite([spec])[0]
        c.check(spec.expected == "expected-fail" and rep.ok, "critical fixture is expected-fail")
        g = T.gaussian_window()
        crit = F.frame_roundtrip(g, g, g, 1.0, 1.0).residual
        c.check(crit > 1e-2, f"critical round trip {crit:.2e}")


# -- 10 -----------------------------------------------------------------------


def test_criterion_10_inequality_lab(capsys):
    with Criterion(10, 600, capsys) as c:
        specs = [s for s in load_suite() if s.experiment in ("lemma71", "lemma72", "lemma73")
                 and s.expected == "pass"]
        c.check(len(specs) >= 6, f"{len(specs)} lemma experiments")
        for spec in specs:
            rep = lab.run_experiment(spec)
            c.check(rep.passed, f"{spec.identifier} margin {rep.margin:.3g}")
            fine = lab.run_experiment(spec.refined(2))
            c.check(fine.passed, f"{spec.identifier} refined margin {fine.margin:.3g}")
        for name in ("one", "t", "t2"):
            spec = lab.ExperimentSpec(f"multiplier_{name}", "multiplier", windows=("gaussian",),
                                      params=(("multiplier", name),))
            rep = lab.run_experiment(spec)
            c.check(rep.passed, f"multiplier {name} margin {rep.margin:.3g}")


# -- 11 -----------------------------------------------------------------------


def test_criterion_11_determinism(capsys, tmp_path):
    with Criterion(11, 600, capsys) as c:
        texts = []
        for name in ("first.json", "second.json"):
            out = tmp_path / name
            rc = cli.main(["suite", "--out", str(out)])
            c.check(rc == 0, f"suite exit status {rc}")
            texts.append(out.read_bytes())
        strip = [b"\n".join(l for l in t.split(b"\n") if b'"generated_at"' not in l) for t in texts]
        c.check(strip[0] == strip[1], "byte-identical apart from the timestamp")
        c.check(reports.strip_timestamp(texts[0].decode()) == reports.strip_timestamp(texts[1].decode()),
                "parsed documents equal")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
