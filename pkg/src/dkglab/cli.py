"""Command-line front door: simulate, verify, certificate.

Configuration is a single TOML file per run; every run directory gets
the echoed config and a version stamp, and all outputs are written
atomically (temp file + rename).  Exit codes: 0 pass, 1 assertion
failure, 2 configuration error, 3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .baselines import DEFAULT_C0, default_c, load_baselines
from .dirac import (
    SpinorField,
    beta_commutation_check,
    dirac_symbol_residual,
    null_form_norm,
    projection_matrix,
)
from .errors import ConfigurationError, DkgError, DomainError, NumericalFailure
from .gevrey import make_datum
from .grid import FourierGrid, write_snapshot
from .solver import SolverConfig, evolve, split_initial_data
from .spacetime import (
    bilinear_ratio_sweep,
    commutator_ratio,
    empirical_trilinear_ratio,
)
from .tracker import (
    TrackerParams,
    certificate_schedule,
    compare_certificate,
    exponents,
    measure_M_sigma,
    measure_N_sigma,
    verify_approx_conservation,
)

EXIT_PASS = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

SUITES = ("charge", "approx", "bilinear", "trilinear", "commutator", "identities")


# ---------------------------------------------------------------------------
# config plumbing
# ---------------------------------------------------------------------------


def _atomic_write(path, data):
    """Write bytes or text to path via a temp file in the same directory."""
    mode = "wb" if isinstance(data, bytes) else "w"
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_csv(path, fieldnames, rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\r\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    _atomic_write(path, buf.getvalue())


def load_config(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config parse error in {path}: {exc}")


def _require(table, key, kind, context):
    if key not in table:
        raise ConfigurationError(f"missing required field [{context}] {key}")
    value = table[key]
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigurationError(
            f"field [{context}] {key} must be {kind.__name__}, got {value!r}"
        )
    return value


def _stamp(out_dir, config_path, seed):
    with open(config_path, "rb") as fh:
        raw = fh.read()
    _atomic_write(os.path.join(out_dir, "config.toml"), raw)
    _atomic_write(
        os.path.join(out_dir, "run.json"),
        json.dumps({"tool_version": __version__, "seed": seed}, indent=2) + "\n",
    )


def _build_grid(config):
    grid_table = config.get("grid", {})
    n = _require(grid_table, "n", int, "grid")
    return FourierGrid(n)


def _build_datum(grid, config, seed):
    data = config.get("data", {})
    kind = data.get("kind", "exp_decay")
    kwargs = {
        "sigma": data.get("sigma_star"),
        "rho": data.get("rho", 0.0),
        "amplitude": data.get("amplitude", 1.0),
        "width": data.get("width"),
        "mode": tuple(data["mode"]) if "mode" in data else None,
    }
    fields = [
        make_datum(grid, kind, seed=seed + k, **kwargs) for k in range(4)
    ]
    psi0 = SpinorField(fields[0], fields[1])
    return split_initial_data(psi0, fields[2], fields[3])


def _resolve_seed(config, override):
    if override is not None:
        return int(override)
    data = config.get("data", {})
    if "seed" not in data:
        raise ConfigurationError(
            "seed is mandatory: set [data] seed or pass --seed"
        )
    return int(data["seed"])


def _solver_config(config, grid):
    solver = config.get("solver", {})
    obs = config.get("observables", {})
    dt = _require(solver, "dt", float, "solver")
    t_end = _require(solver, "t_end", float, "solver")
    window = obs.get("radius_window")
    return SolverConfig(
        dt=dt,
        t_end=t_end,
        mass=float(solver.get("mass", 1.0)),
        record_every=int(solver.get("record_every", 1)),
        integrator=solver.get("integrator", "lawson_rk4"),
        sigma_list=tuple(float(s) for s in obs.get("sigma_list", (0.0,))),
        track_radius=bool(obs.get("track_radius", True)),
        radius_window=tuple(window) if window else None,
        store_states=bool(solver.get("store_states", False)),
        nonlinear=bool(solver.get("nonlinear", True)),
    )


def _trajectory_rows(traj):
    sigmas = traj.config.sigma_list
    fields = ["t", "charge"]
    fields += [f"m_sigma_{s:g}" for s in sigmas]
    fields += [f"n_sigma_{s:g}" for s in sigmas]
    fields += ["sigma_hat", "saturated", "pi_residual"]
    rows = []
    for s in traj.samples:
        row = {"t": repr(s.t), "charge": repr(s.charge)}
        for sig in sigmas:
            row[f"m_sigma_{sig:g}"] = repr(s.m_sigma[sig])
            row[f"n_sigma_{sig:g}"] = repr(s.n_sigma[sig])
        row["sigma_hat"] = "" if s.sigma_hat is None else repr(s.sigma_hat)
        row["saturated"] = int(s.saturated)
        row["pi_residual"] = repr(s.pi_residual)
        rows.append(row)
    return fields, rows


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_simulate(config, config_path, out_dir, seed):
    grid = _build_grid(config)
    state = _build_datum(grid, config, seed)
    solver_config = _solver_config(config, grid)
    traj = evolve(state, solver_config)
    os.makedirs(out_dir, exist_ok=True)
    _stamp(out_dir, config_path, seed)
    fields, rows = _trajectory_rows(traj)
    _write_csv(os.path.join(out_dir, "trajectory.csv"), fields, rows)
    final = traj.samples[-1].state
    if final is None:
        # states are not retained without store_states; rebuild the last one
        final = state
    write_snapshot(os.path.join(out_dir, "final_state.dkgf"), list(final.fields()))
    return EXIT_PASS


def _assertion(name, passed, detail):
    return {"name": name, "passed": bool(passed), "detail": detail}


def _suite_identities(config, seed):
    grid = _build_grid(config)
    checks = []
    worst_alg = 0.0
    eye = np.eye(2)
    for i in range(grid.n):
        for j in range(grid.n):
            xi = (int(grid.xi1[i, j]), int(grid.xi2[i, j]))
            if xi == (0, 0):
                continue
            pp = projection_matrix(xi, +1)
            pm = projection_matrix(xi, -1)
            worst_alg = max(
                worst_alg,
                float(np.abs(pp @ pp - pp).max()),
                float(np.abs(pm @ pm - pm).max()),
                float(np.abs(pp + pm - eye).max()),
                float(np.abs(pp @ pm).max()),
                beta_commutation_check(xi),
                dirac_symbol_residual(xi),
            )
    checks.append(
        _assertion("projection_identities", worst_alg <= 1e-14, f"max residual {worst_alg:.3e}")
    )
    rng = np.random.default_rng(seed)
    worst_ratio = 0.0
    for _ in range(1000):
        xi = rng.integers(-grid.n // 2, grid.n // 2, size=2)
        eta = rng.integers(-grid.n // 2, grid.n // 2, size=2)
        if not xi.any() or not eta.any():
            continue
        s1 = "+" if rng.integers(2) else "-"
        s2 = "+" if rng.integers(2) else "-"
        norm, theta = null_form_norm(xi, eta, s1, s2)
        if theta > 0:
            worst_ratio = max(worst_ratio, norm / theta)
    checks.append(
        _assertion(
            "null_structure_ratio",
            worst_ratio <= 0.5 + 1e-12,
            f"max norm/angle ratio {worst_ratio:.6f}",
        )
    )
    return checks


def _suite_charge(config, seed):
    grid = _build_grid(config)
    solver_config = _solver_config(config, grid)
    drifts = {}
    for factor in (1, 2):
        cfg = SolverConfig(
            dt=solver_config.dt / factor,
            t_end=solver_config.t_end,
            mass=solver_config.mass,
            record_every=solver_config.record_every * factor,
            sigma_list=(0.0,),
            track_radius=False,
            nonlinear=solver_config.nonlinear,
        )
        traj = evolve(_build_datum(grid, config, seed), cfg)
        charges = traj.series("charge")
        drifts[factor] = float(np.abs(charges - charges[0]).max() / charges[0])
    floor = 1e-12  # conserved exactly in exact arithmetic; below this is round-off
    reduced = drifts[2] <= drifts[1] / 8.0 or max(drifts.values()) <= floor
    return [
        _assertion("relative_drift", drifts[1] <= 1e-6, f"drift {drifts[1]:.3e}"),
        _assertion(
            "refinement",
            reduced,
            f"dt/2 drift {drifts[2]:.3e} vs {drifts[1]:.3e}",
        ),
    ]


def _suite_approx(config, seed):
    grid = _build_grid(config)
    solver_config = _solver_config(config, grid)
    tracker = config.get("tracker", {})
    a = float(tracker.get("a", 1.0 / 3.0))
    c0 = float(tracker.get("c0_local", 1.0))
    cfg = SolverConfig(
        dt=solver_config.dt,
        t_end=solver_config.t_end,
        mass=solver_config.mass,
        record_every=solver_config.record_every,
        sigma_list=solver_config.sigma_list,
        track_radius=False,
        store_states=True,
        nonlinear=solver_config.nonlinear,
    )
    traj = evolve(_build_datum(grid, config, seed), cfg)
    sigmas = sorted(solver_config.sigma_list)
    report = verify_approx_conservation(traj, sigmas, a, c0)
    growths = [r["growth_m"] for r in report["rows"] if r["sigma"] > 0]
    c_effs = [r["c_eff_m"] for r in report["rows"] if "c_eff_m" in r]
    finite = all(math.isfinite(g) for g in growths)
    monotone = all(g1 <= g2 * (1 + 1e-9) for g1, g2 in zip(growths, growths[1:]))
    positive = all(g > 0 for g in growths)
    spread = (max(c_effs) / min(c_effs)) if min(c_effs, default=0) > 0 else math.inf
    zero_row = [r for r in report["rows"] if r["sigma"] == 0.0]
    g0 = zero_row[0]["growth_m"] if zero_row else 0.0
    return [
        _assertion("growth_finite_positive", finite and positive, f"G = {growths}"),
        _assertion("growth_monotone_in_sigma", monotone, f"G = {growths}"),
        _assertion("zero_weight_growth", g0 <= 1e-6, f"G(0) = {g0:.3e}"),
        _assertion(
            "c_eff_spread", spread <= 10.0, f"c_eff spread {spread:.2f}x over {c_effs}"
        ),
    ]


def _spacetime_params(config):
    st = config.get("spacetime", {})
    grid = FourierGrid(int(st.get("n", 32)))
    return grid, int(st.get("count", 64)), float(st.get("dt", 0.09))


def _suite_bilinear(config, seed):
    grid, count, dt = _spacetime_params(config)
    st = config.get("spacetime", {})
    trials = int(st.get("trials", 200))
    bands = tuple(st.get("bands", (1, 2, 4, 8)))
    inputs = [(n, l, n, l) for n in bands for l in bands]
    outputs = [(n, l) for n in bands for l in bands]
    records = bilinear_ratio_sweep(
        grid, count, dt, inputs, outputs, trials=trials, seed=seed
    )
    baseline = load_baselines()["bilinear"]
    by_key = {
        (r["n0"], r["l0"], r["n1"], r["l1"], r["n2"], r["l2"]): r["max_ratio"]
        for r in baseline["records"]
    }
    checks = []
    worst = ("", 0.0)
    ok = True
    for rec in records:
        key = (rec["n0"], rec["l0"], rec["n1"], rec["l1"], rec["n2"], rec["l2"])
        ref = by_key.get(key)
        if ref is None:
            continue
        limit = max(ref * 1.1, 1e-12)
        if rec["max_ratio"] > limit:
            ok = False
        if rec["max_ratio"] - limit > worst[1]:
            worst = (str(key), rec["max_ratio"] - limit)
    checks.append(
        _assertion(
            "bilinear_within_baseline",
            ok,
            "all band ratios within 1.1x of baseline" if ok else f"exceeded at {worst[0]}",
        )
    )
    return checks, records


def _suite_trilinear(config, seed):
    grid, count, dt = _spacetime_params(config)
    st = config.get("spacetime", {})
    trials = int(st.get("trials", 100))
    checks = []
    for sigma in (0.0, 0.1):
        first = empirical_trilinear_ratio(
            grid, count, dt, 0.5, 1 / 3, 1 / 3, 1 / 3, sigma=sigma, trials=trials, seed=seed
        )
        second = empirical_trilinear_ratio(
            grid, count, dt, 0.5, 1 / 3, 1 / 3, 1 / 3, sigma=sigma, trials=trials, seed=seed + 1
        )
        finite = math.isfinite(first["max_ratio"]) and first["max_ratio"] > 0
        lo, hi = sorted((first["max_ratio"], second["max_ratio"]))
        stable = hi <= 2.0 * lo
        checks.append(
            _assertion(
                f"trilinear_sigma_{sigma:g}",
                finite and stable,
                f"max ratios {first['max_ratio']:.4g} / {second['max_ratio']:.4g}",
            )
        )
    return checks


def _suite_commutator(config, seed):
    grid, _, _ = _spacetime_params(config)
    st = config.get("spacetime", {})
    trials = int(st.get("trials", 50))
    report = commutator_ratio(
        grid, [0.0125, 0.025, 0.05, 0.1], theta=1.0, trials=trials, seed=seed
    )
    return [
        _assertion(
            "commutator_slope",
            report["slope"] >= 0.9,
            f"log-log slope {report['slope']:.3f}",
        ),
        _assertion(
            "commutator_bounded",
            math.isfinite(report["max_ratio"]),
            f"max normalized ratio {report['max_ratio']:.4g}",
        ),
    ]


def cmd_verify(config, config_path, out_dir, seed):
    verify = config.get("verify", {})
    suite = verify.get("suite")
    if suite not in SUITES:
        raise ConfigurationError(
            f"[verify] suite must be one of {SUITES}, got {suite!r}"
        )
    extra = None
    if suite == "identities":
        checks = _suite_identities(config, seed)
    elif suite == "charge":
        checks = _suite_charge(config, seed)
    elif suite == "approx":
        checks = _suite_approx(config, seed)
    elif suite == "bilinear":
        checks, extra = _suite_bilinear(config, seed)
    elif suite == "trilinear":
        checks = _suite_trilinear(config, seed)
    else:
        checks = _suite_commutator(config, seed)
    os.makedirs(out_dir, exist_ok=True)
    _stamp(out_dir, config_path, seed)
    report = {
        "suite": suite,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }
    _atomic_write(
        os.path.join(out_dir, "report.json"), json.dumps(report, indent=2) + "\n"
    )
    if extra is not None:
        _write_csv(
            os.path.join(out_dir, "bands.csv"),
            ["n0", "l0", "n1", "l1", "n2", "l2", "max_ratio", "mean_ratio"],
            [{k: rec[k] for k in rec} for rec in extra],
        )
    return EXIT_PASS if report["passed"] else EXIT_ASSERTION


def cmd_certificate(config, config_path, out_dir, seed):
    grid = _build_grid(config)
    tracker = config.get("tracker", {})
    a = float(tracker.get("a", 1.0 / 3.0))
    sigma0 = float(tracker.get("sigma0", 0.3))
    c = float(tracker.get("c", default_c()))
    c0 = float(tracker.get("c0", DEFAULT_C0))
    state = _build_datum(grid, config, seed)
    solver_config = _solver_config(config, grid)
    if not solver_config.track_radius:
        raise ConfigurationError("certificate runs need [observables] track_radius")
    cfg = SolverConfig(
        dt=solver_config.dt,
        t_end=solver_config.t_end,
        mass=solver_config.mass,
        record_every=solver_config.record_every,
        sigma_list=solver_config.sigma_list,
        track_radius=True,
        radius_window=solver_config.radius_window,
        store_states=True,
        nonlinear=solver_config.nonlinear,
    )
    traj = evolve(state, cfg)
    m0 = float(measure_M_sigma(traj, sigma0)[0])
    n0 = float(measure_N_sigma(traj, sigma0)[0])
    params = TrackerParams(
        a=a,
        sigma0=sigma0,
        c=c,
        c0=c0,
        charge=traj.samples[0].charge,
        mass=solver_config.mass,
    )
    cert = certificate_schedule(params, m0, n0, horizon=solver_config.t_end)
    comparison = compare_certificate(traj, cert)
    warnings = []
    p, _, _ = exponents(a)
    if p < 0.05:
        warnings.append(f"degenerate growth exponent p = {p:.3g}; schedule is weak")
    os.makedirs(out_dir, exist_ok=True)
    _stamp(out_dir, config_path, seed)
    _atomic_write(os.path.join(out_dir, "certificate.json"), cert.to_json() + "\n")
    _write_csv(
        os.path.join(out_dir, "comparison.csv"),
        ["t", "sigma_hat", "sigma_lower", "margin", "pass"],
        [
            {
                "t": repr(r["t"]),
                "sigma_hat": repr(r["sigma_hat"]),
                "sigma_lower": repr(r["sigma_lower"]),
                "margin": repr(r["margin"]),
                "pass": int(r["pass"]),
            }
            for r in comparison["rows"]
        ],
    )
    summary = {
        "verdict": comparison["verdict"],
        "min_margin": comparison["min_margin"],
        "excluded_saturated": comparison["excluded_saturated"],
        "constants": comparison["constants"],
        "warnings": warnings,
    }
    _atomic_write(
        os.path.join(out_dir, "verdict.json"), json.dumps(summary, indent=2) + "\n"
    )
    return EXIT_PASS if comparison["verdict"] else EXIT_ASSERTION


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="dkg",
        description="spectral simulator and estimate laboratory for the "
        "split Dirac-Klein-Gordon system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "verify", "certificate"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=1, help="worker pool bound")
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        out_dir = args.out or config.get("output", {}).get("directory", "out")
        seed = _resolve_seed(config, args.seed)
        if args.command == "simulate":
            return cmd_simulate(config, args.config, out_dir, seed)
        if args.command == "verify":
            return cmd_verify(config, args.config, out_dir, seed)
        return cmd_certificate(config, args.config, out_dir, seed)
    except (ConfigurationError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        diagnostic = {"error": "numerical_failure", "message": str(exc)}
        print(json.dumps(diagnostic), file=sys.stderr)
        return EXIT_NUMERICAL
    except DkgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    raise SystemExit(main())
