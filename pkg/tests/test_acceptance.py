"""Acceptance gate: one test per shipped guarantee, one verdict line each.

Every criterion below runs at its stated tolerance and appends a single
"ACCEPTANCE <n> <name>: PASS|FAIL" line to the terminal summary.  Checks
accumulate into a failure list so a criterion always reports exactly one
verdict, then fails with the collected details.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import numpy as np

from cp_calculus.cpmap import (
    CpMap,
    add,
    apply,
    canonicalize,
    compose,
    from_choi,
    from_stinespring,
    is_quantum_operation,
    scale,
    to_choi,
    to_stinespring,
)
from cp_calculus.duality import (
    FaithfulState,
    faithful_channel,
    faithful_rn,
    jam_apply,
    jam_compose,
    jam_forward,
    jam_is_operation,
)
from cp_calculus.norms import (
    bound_rn,
    cb_norm_cp,
    common_dilation,
    diamond_lower,
    norm_report,
)
from cp_calculus.numerics import EPS_PSD, op_norm
from cp_calculus.order import DifferenceVerdict, channel_difference_is_cp, order_chain_dilation
from cp_calculus.radon import dominates, rn_derivative, rn_reconstruct
from cp_calculus.serialize import cpmap_to_json, dumps
from helpers import (
    conic_chain,
    matrix_units,
    order_gram_psd,
    rand_channel,
    rand_contraction,
    rand_cp_map,
    rand_operation,
    rand_unitary,
)

SEED = 20260821

IDENT = CpMap(2, 2, (np.eye(2),))
XCONJ = CpMap(2, 2, (np.array([[0.0, 1.0], [1.0, 0.0]]),))


def criterion(num, name):
    """Wrap a check so it always emits exactly one verdict line."""

    def wrap(fn):
        def runner(acceptance_log):
            failures = []
            try:
                fn(failures)
            except Exception as exc:
                failures.append(f"unexpected {type(exc).__name__}: {exc}")
            line = f"ACCEPTANCE {num:2d} {name}: {'PASS' if not failures else 'FAIL'}"
            print(line)
            acceptance_log.append(line)
            assert not failures, "; ".join(str(f) for f in failures[:6])

        runner.__name__ = fn.__name__
        runner.__doc__ = fn.__doc__
        return runner

    return wrap


def _rng(num):
    return np.random.default_rng([SEED, num])


@criterion(1, "representation round trips")
def test_criterion_01_round_trips(failures):
    """Kraus -> Choi -> Kraus and Kraus -> Stinespring -> Kraus, 200 maps."""
    rng = _rng(1)
    for trial in range(200):
        if trial % 10 == 0:
            m, n = int(rng.integers(5, 7)), int(rng.integers(5, 7))
        else:
            m, n = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        t = rand_cp_map(rng, m, n, norm=float(rng.uniform(0.5, 2.0)))
        via_choi = from_choi(to_choi(t))
        via_stine = from_stinespring(to_stinespring(t))
        for unit in matrix_units(m):
            want = apply(t, unit)
            for label, back in (("choi", via_choi), ("stinespring", via_stine)):
                err = float(np.max(np.abs(apply(back, unit) - want)))
                if err > 1e-10:
                    failures.append(f"trial {trial} {label} error {err:.3e}")


@criterion(2, "derivative recovery")
def test_criterion_02_derivative_recovery(failures):
    """s built from a density on t's environment is recovered, 200 pairs."""
    rng = _rng(2)
    for trial in range(200):
        m, n = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        t = rand_cp_map(rng, m, n, norm=float(rng.uniform(0.5, 2.0)))
        env = len(canonicalize(t).kraus)
        f = rand_contraction(rng, env)
        s = rn_reconstruct(t, f)
        d = rn_derivative(s, t)
        gap = op_norm(d.matrix - f)
        if gap > 1e-9:
            failures.append(f"trial {trial} density gap {gap:.3e}")
        resid = op_norm(to_choi(rn_reconstruct(t, d)).matrix - to_choi(s).matrix)
        if resid > 1e-10:
            failures.append(f"trial {trial} reconstruction residual {resid:.3e}")


@criterion(3, "domination oracle agreement")
def test_criterion_03_oracle_agreement(failures):
    """Choi-order verdicts match 50-sample quadratic-form checks, 100 pairs."""
    rng = _rng(3)
    seen = {True: 0, False: 0}
    for trial in range(100):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        t = rand_cp_map(rng, m, n, norm=1.0)
        kind = trial % 4
        if kind == 0:
            env = len(canonicalize(t).kraus)
            s = rn_reconstruct(t, rand_contraction(rng, env))
        elif kind == 1:
            s = scale(t, float(rng.uniform(0.1, 1.0)))
        elif kind == 2:
            s = scale(t, float(rng.uniform(1.3, 2.0)))
        else:
            s = rand_cp_map(rng, m, n, norm=1.0)
        verdict = dominates(s, t)
        oracle = order_gram_psd(s, t, rng, n_vectors=50)
        seen[verdict] += 1
        if verdict != oracle:
            failures.append(f"trial {trial} kind {kind}: verdict {verdict}, oracle {oracle}")
    for label in (True, False):
        if seen[label] == 0:
            failures.append(f"no {label} cases generated")


@criterion(4, "process operator window")
def test_criterion_04_process_window(failures):
    """0 <= F <= m^2 for operations; action recovery; operation criterion."""
    rng = _rng(4)
    pool = []
    for trial in range(100):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        t = rand_operation(rng, m, n)
        pool.append(t)
        f = jam_forward(t)
        w = np.linalg.eigvalsh(f.matrix)
        if w[0] < -EPS_PSD or w[-1] > m * m + EPS_PSD:
            failures.append(f"trial {trial} spectrum [{w[0]:.3e}, {w[-1]:.3e}]")
        for unit in matrix_units(m):
            err = float(np.max(np.abs(jam_apply(f, unit) - apply(t, unit))))
            if err > 1e-10:
                failures.append(f"trial {trial} action error {err:.3e}")
    for _ in range(30):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        pool.append(rand_cp_map(rng, m, n, norm=float(rng.uniform(1.05, 3.0))))
    for k, t in enumerate(pool):
        direct = is_quantum_operation(t)
        via_choi = jam_is_operation(jam_forward(t))
        if direct != via_choi:
            failures.append(f"map {k}: criterion split {direct} vs {via_choi}")


@criterion(5, "composition of process operators")
def test_criterion_05_composition(failures):
    """jam_compose equals the process operator of the composed map, 50 triples."""
    rng = _rng(5)
    for trial in range(50):
        m, n, d = (int(rng.integers(2, 4)) for _ in range(3))
        t1 = rand_cp_map(rng, m, n, norm=float(rng.uniform(0.5, 1.5)))
        t2 = rand_cp_map(rng, n, d, norm=float(rng.uniform(0.5, 1.5)))
        lhs = jam_compose(jam_forward(t2), jam_forward(t1))
        rhs = jam_forward(compose(t2, t1))
        err = float(np.max(np.abs(lhs.matrix - rhs.matrix)))
        if err > 1e-10:
            failures.append(f"trial {trial} composition error {err:.3e}")


@criterion(6, "channel rigidity")
def test_criterion_06_channel_rigidity(failures):
    """Distinct channels never dominate each other; equal pairs verdict Equal."""
    rng = _rng(6)
    for trial in range(200):
        m, n = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        s = rand_channel(rng, m, n)
        t = rand_channel(rng, m, n)
        if dominates(s, t) or dominates(t, s):
            failures.append(f"trial {trial}: domination between distinct channels")
        if trial % 10 == 0:
            if channel_difference_is_cp(s, t) is not DifferenceVerdict.NOT_CP:
                failures.append(f"trial {trial}: distinct pair not flagged")
            if channel_difference_is_cp(t, t) is not DifferenceVerdict.EQUAL:
                failures.append(f"trial {trial}: equal pair not Equal")


@criterion(7, "monotone chain dilation")
def test_criterion_07_chain_dilation(failures):
    """Shared dilation with idempotent increasing projections, 50 chains."""
    rng = _rng(7)
    for trial in range(50):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(2, m + 1))
        length = int(rng.integers(1, 5))
        chain = conic_chain(rng, m, n, length)
        result = order_chain_dilation(chain)
        prev = np.zeros((result.env_dim, result.env_dim))
        for k, t in enumerate(chain):
            p = result.projections[k]
            idem = op_norm(p @ p - p)
            if idem > 1e-10:
                failures.append(f"trial {trial} step {k}: ||P^2 - P|| {idem:.3e}")
            step = np.linalg.eigvalsh((p - prev + (p - prev).conj().T) / 2)[0]
            if step < -EPS_PSD:
                failures.append(f"trial {trial} step {k}: monotonicity {step:.3e}")
            prev = p
            worst = 0.0
            for unit in matrix_units(m):
                lhs = result.isometry.conj().T @ np.kron(unit, p) @ result.isometry
                worst = max(worst, float(np.max(np.abs(lhs - apply(t, unit)))))
            if worst > 1e-9:
                failures.append(f"trial {trial} step {k}: reconstruction {worst:.3e}")


@criterion(8, "norm sandwich")
def test_criterion_08_norm_sandwich(failures):
    """Lower estimate under both upper bounds; known-gap and channel values."""
    rng = _rng(8)
    for trial in range(100):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        t1 = rand_channel(rng, m, n)
        t2 = rand_channel(rng, m, n)
        report = norm_report(t1, t2, seed=trial, restarts=3)
        for label, upper in (("rn", report.upper_rn), ("dilation", report.upper_dilation)):
            if report.lower > upper + 1e-12 * max(1.0, upper):
                failures.append(
                    f"trial {trial}: lower {report.lower:.12e} above {label} {upper:.12e}"
                )
    # unit-flip pair has distinguishability norm exactly 2; the float
    # overshoot headroom at the top edge is 1e-12
    val = diamond_lower(IDENT, XCONJ, seed=0, restarts=32)
    if not (2.0 - 1e-4 <= val <= 2.0 + 1e-12):
        failures.append(f"unit-flip estimate {val:.12e} outside [2 - 1e-4, 2]")
    for _ in range(10):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        gap = abs(cb_norm_cp(rand_channel(rng, m, n)) - 1.0)
        if gap > 1e-12:
            failures.append(f"channel norm off by {gap:.3e}")


@criterion(9, "shared dilation bound")
def test_criterion_09_shared_dilation(failures):
    """Both maps recovered from one environment; difference within the bound."""
    rng = _rng(9)
    for trial in range(100):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        if trial % 5 == 4:
            t1 = rand_operation(rng, m, n)
            t2 = rand_operation(rng, m, n)
        else:
            t1 = rand_channel(rng, m, n)
            t2 = rand_channel(rng, m, n)
        pair = common_dilation(t1, t2)
        eye_env = np.eye(pair.env_dim)
        for label, v, t in (("v1", pair.v1, t1), ("v2", pair.v2, t2)):
            worst = 0.0
            for unit in matrix_units(m):
                lhs = v.conj().T @ np.kron(unit, eye_env) @ v
                worst = max(worst, float(np.max(np.abs(lhs - apply(t, unit)))))
            if worst > 1e-9:
                failures.append(f"trial {trial} {label}: reconstruction {worst:.3e}")
        gap = op_norm(pair.v1 - pair.v2)
        cap = m * np.sqrt(bound_rn(t1, t2))
        if gap > cap * (1.0 + 1e-9) + 1e-12:
            failures.append(f"trial {trial}: gap {gap:.12e} above cap {cap:.12e}")


@criterion(10, "faithful reference consistency")
def test_criterion_10_faithful_reference(failures):
    """Uniform state reproduces the process operator; constants are tight."""
    rng = _rng(10)
    for trial in range(20):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        t = rand_cp_map(rng, m, n, norm=float(rng.uniform(0.3, 2.0)))
        uniform = FaithfulState(p=np.full(m, 1.0 / m))
        gap = float(np.max(np.abs(faithful_rn(t, uniform).matrix - jam_forward(t).matrix)))
        if gap > 1e-12:
            failures.append(f"trial {trial}: uniform gap {gap:.3e}")
    for trial in range(50):
        m, n = int(rng.integers(2, 4)), int(rng.integers(2, 4))
        t = rand_cp_map(rng, m, n, norm=float(rng.uniform(0.3, 2.0)))
        p = rng.uniform(0.2, 1.0, size=m)
        p = p / p.sum()
        basis = rand_unitary(rng, m) if trial % 2 else None
        w = FaithfulState(p=p, basis=basis)
        d = faithful_rn(t, w)
        if not dominates(t, scale(faithful_channel(w, n), d.constant)):
            failures.append(f"trial {trial}: constant does not dominate")
        cap = (1.0 / p.min()) ** 2 * cb_norm_cp(t) * (1.0 + 1e-9)
        if d.constant > cap:
            failures.append(f"trial {trial}: constant {d.constant:.6e} above {cap:.6e}")


@criterion(11, "deterministic command line")
def test_criterion_11_cli_determinism(failures):
    """Ten fixed-seed runs, serial and parallel, byte-identical stdout."""
    rng = _rng(11)
    with tempfile.TemporaryDirectory() as tmp:
        paths = []
        for name in ("a.json", "b.json"):
            path = Path(tmp) / name
            path.write_text(dumps(cpmap_to_json(rand_channel(rng, 2, 2))))
            paths.append(str(path))
        argv = [
            sys.executable,
            "-m",
            "cp_calculus",
            "bounds",
            *paths,
            "--seed",
            "7",
            "--restarts",
            "8",
        ]
        outputs = set()
        for run in range(10):
            workers = "4" if run % 2 else "1"
            proc = subprocess.run(
                argv + ["--workers", workers], capture_output=True
            )
            if proc.returncode != 0:
                failures.append(f"run {run}: exit {proc.returncode}")
            outputs.add(proc.stdout)
        if len(outputs) != 1:
            failures.append(f"{len(outputs)} distinct outputs across 10 runs")
        elif not outputs.pop().startswith(b"{"):
            failures.append("stdout is not the expected report")
