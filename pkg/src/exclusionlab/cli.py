"""Command-line front end: simulation runs, stationary tables, PDE solves,
spectra, verification reports, and the regime table.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure (with a
diagnostics file when an output directory is available).
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import traceback
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, parse_config
from .harness import (ConvergenceReport, ExperimentSpec, correlation_scan,
                      hydrodynamic_experiment, hydrostatic_experiment)
from .kernels import LONG_JUMP, NEAREST_NEIGHBOR
from .kmc import SnapshotSchedule, resolve_threads, run_ensemble
from .observables import accumulate_correlation, accumulate_profile
from .params import (BernoulliProduct, ModelParams, UnsupportedRegimeError,
                     long_jump_params, nearest_neighbor_params, profile_preset)
from .pde import dispatch_params, regime_dispatch
from .spectral import eigenvalue_residual, robin_eigenvalues
from .stationary import brute_force_stationary, macro_profile, phi_ss, rho_ss
from . import svgplot

F = "{:.17g}".format  # round-trip exact float printing


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return F(float(v))
    return str(v)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _model_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--N", type=int, default=None)
    sub.add_argument("--alpha", type=float, default=None)
    sub.add_argument("--beta", type=float, default=None)
    sub.add_argument("--kappa", type=float, default=None)
    sub.add_argument("--theta", type=float, default=None)
    sub.add_argument("--kernel", choices=["nn", "longjump"], default=None)
    sub.add_argument("--gamma", type=float, default=None)
    sub.add_argument("--theta-N", dest="theta_N", type=float, default=None)


def _common_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", type=Path, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", type=Path, default=None)
    sub.add_argument("--replicas", type=int, default=None)
    sub.add_argument("--threads", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exclusionlab",
                                 description="exclusion process with reservoirs: "
                                             "simulate, solve, verify")
    sp = ap.add_subparsers(dest="command", required=True)

    sim = sp.add_parser("simulate", help="Monte Carlo ensemble, profile/correlation CSVs")
    _common_args(sim); _model_args(sim)
    sim.add_argument("--times", type=str, default=None, help="comma-separated macro times")
    sim.add_argument("--profile", type=str, default=None, help="step|linear|constant|bump")
    sim.add_argument("--profile-value", type=float, default=None)
    sim.add_argument("--sampler", choices=["auto", "exact", "thinning"], default=None)
    sim.add_argument("--correlations", action="store_true")

    st = sp.add_parser("stationary", help="closed forms and the exact oracle")
    _common_args(st); _model_args(st)

    pd = sp.add_parser("pde", help="limiting-equation solution on a grid")
    _common_args(pd); _model_args(pd)
    pd.add_argument("--t", type=float, default=0.1)
    pd.add_argument("--grid-points", type=int, default=256)
    pd.add_argument("--profile", type=str, default="step")
    pd.add_argument("--profile-value", type=float, default=None)

    spx = sp.add_parser("spectrum", help="Robin eigenvalues and residuals")
    _common_args(spx)
    spx.add_argument("--kappa", type=float, default=1.0)
    spx.add_argument("--n", type=int, default=20)

    ver = sp.add_parser("verify", help="cross-layer convergence reports and figures")
    _common_args(ver); _model_args(ver)
    ver.add_argument("--experiment",
                     choices=["hydrodynamic", "hydrostatic", "correlation-scan"],
                     default="hydrodynamic")
    ver.add_argument("--times", type=str, default=None)
    ver.add_argument("--profile", type=str, default=None)
    ver.add_argument("--N-list", type=str, default=None, help="comma-separated sizes")
    ver.add_argument("--theta-list", type=str, default=None)

    rg = sp.add_parser("regimes", help="dispatch table for a kernel")
    _common_args(rg)
    rg.add_argument("--kernel", choices=["nn", "longjump"], default="nn")
    rg.add_argument("--gamma", type=float, default=None)
    rg.add_argument("--kappa", type=float, default=1.0)
    return ap


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config) if args.config else RunConfig({})
    overrides = {
        "model.N": getattr(args, "N", None),
        "model.alpha": getattr(args, "alpha", None),
        "model.beta": getattr(args, "beta", None),
        "model.kappa": getattr(args, "kappa", None) if args.command != "spectrum" else None,
        "model.theta": getattr(args, "theta", None),
        "model.theta_N": getattr(args, "theta_N", None),
        "kernel.kind": getattr(args, "kernel", None),
        "kernel.gamma": getattr(args, "gamma", None),
        "schedule.times": getattr(args, "times", None),
        "schedule.profile": getattr(args, "profile", None),
        "schedule.profile_value": getattr(args, "profile_value", None),
        "ensemble.replicas": getattr(args, "replicas", None),
        "ensemble.seed": getattr(args, "seed", None),
        "ensemble.threads": getattr(args, "threads", None),
        "ensemble.sampler": getattr(args, "sampler", None),
        "output.dir": str(args.out) if getattr(args, "out", None) else None,
    }
    return cfg.merged(overrides)


def _params_from(cfg: RunConfig) -> ModelParams:
    kind = cfg.get("kernel.kind", "nn")
    N = int(cfg.get("model.N", 32))
    alpha = float(cfg.get("model.alpha", 0.2))
    beta = float(cfg.get("model.beta", 0.8))
    kappa = float(cfg.get("model.kappa", 1.0))
    theta = float(cfg.get("model.theta", 0.0))
    theta_N = cfg.get("model.theta_N")
    theta_N = float(theta_N) if theta_N is not None else None
    if kind in ("nn", NEAREST_NEIGHBOR):
        return nearest_neighbor_params(N, alpha, beta, kappa, theta, theta_N)
    gamma = cfg.get("kernel.gamma")
    if gamma is None:
        raise ConfigError("kernel.gamma is required for the long-jump kernel")
    tol = float(cfg.get("kernel.series_tol", 1e-12))
    return long_jump_params(N, float(gamma), alpha, beta, kappa, theta, theta_N,
                            series_tol=tol)


def _profile_from(cfg: RunConfig):
    name = cfg.get("schedule.profile", "step")
    value = cfg.get("schedule.profile_value")
    if name == "constant":
        return profile_preset("constant", value=float(value) if value is not None else 0.5)
    return profile_preset(str(name))


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.get("output.dir", "runs/latest"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _param_hash(params: ModelParams) -> str:
    text = (f"{params.N}|{params.alpha}|{params.beta}|{params.kappa}|{params.theta}|"
            f"{params.kernel.kind}|{params.kernel.gamma}|{params.theta_N}")
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def _profile_rows(params, times, est, ode, pdevals):
    kern = params.kernel
    rows = []
    for k, t in enumerate(times):
        for i, x in enumerate(range(1, params.N)):
            rows.append([params.N, params.theta, params.kappa, params.alpha,
                         params.beta, kern.gamma if kern.gamma is not None else "",
                         "nn" if kern.kind == NEAREST_NEIGHBOR else "longjump",
                         t, x, est.mean[k][i], est.stderr[k][i],
                         ode[k][i] if ode is not None else "",
                         pdevals[k][i] if pdevals is not None else ""])
    return rows


PROFILE_HEADER = ["N", "theta", "kappa", "alpha", "beta", "gamma", "kernel",
                  "t", "x", "rho_mc", "rho_stderr", "rho_ode", "rho_pde"]


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    params = _params_from(cfg)
    profile = _profile_from(cfg)
    times = cfg.times() or (0.02, 0.1)
    replicas = int(cfg.get("ensemble.replicas", 200))
    seed = int(cfg.get("ensemble.seed", 0))
    sampler = str(cfg.get("ensemble.sampler", "auto"))
    out = _outdir(cfg)
    cfg.merged({"schedule.times": ",".join(map(str, times)),
                "ensemble.replicas": replicas, "ensemble.seed": seed}).dump(
        out / "config.resolved")
    sched = SnapshotSchedule(times)
    res = run_ensemble(params, BernoulliProduct(profile), sched, replicas, seed,
                       sampler=sampler,
                       threads=resolve_threads(cfg.get("ensemble.threads")),
                       event_cap=int(cfg.get("ensemble.event_cap", 10**9)))
    est = accumulate_profile(res.occupations, params)
    from .harness import exact_profile_reference
    ode = exact_profile_reference(params, profile, list(times))
    write_csv(out / "profiles.csv", PROFILE_HEADER,
              _profile_rows(params, times, est, ode, None))
    if args.correlations:
        ce = accumulate_correlation(res.occupations)
        rows = []
        for k, t in enumerate(times):
            for x in range(1, params.N):
                for y in range(x + 1, params.N):
                    rows.append([t, x, y, ce.value[k, x - 1, y - 1],
                                 ce.stderr[k, x - 1, y - 1], ""])
        write_csv(out / "correlations.csv",
                  ["t", "x", "y", "phi_mc", "phi_stderr", "phi_ode"], rows)
    print(f"simulate: wrote {out / 'profiles.csv'} "
          f"({replicas} replicas, sampler={res.sampler})")
    return 0


def cmd_stationary(args) -> int:
    cfg = _load_config(args)
    params = _params_from(cfg)
    out = _outdir(cfg)
    cfg.dump(out / "config.resolved")
    xs = np.arange(1, params.N)
    closed = rho_ss(xs, params)
    rows = []
    oracle = None
    if params.N <= 13:
        oracle = brute_force_stationary(params)
    for i, x in enumerate(xs):
        rows.append([params.N, params.theta, params.kappa, params.alpha, params.beta,
                     "", "nn", "inf", x, closed[i],
                     0.0, oracle.profile[i] if oracle else "", ""])
    write_csv(out / "profiles.csv", PROFILE_HEADER, rows)
    if params.kappa == 1.0:
        rows = []
        for x in range(1, params.N):
            for y in range(x + 1, params.N):
                rows.append(["inf", x, y,
                             oracle.correlation(x, y) if oracle else "",
                             0.0 if oracle else "", phi_ss(x, y, params)])
        write_csv(out / "correlations.csv",
                  ["t", "x", "y", "phi_mc", "phi_stderr", "phi_ode"], rows)
    print("x rho_closed" + (" rho_oracle" if oracle else ""))
    for i, x in enumerate(xs):
        line = f"{x} {F(closed[i])}"
        if oracle:
            line += f" {F(oracle.profile[i])}"
        print(line)
    return 0


def cmd_pde(args) -> int:
    cfg = _load_config(args)
    params = _params_from(cfg)
    regime = dispatch_params(params)
    out = _outdir(cfg)
    cfg.dump(out / "config.resolved")
    if not regime.supported:
        print(f"regime unsupported: {regime.note}")
        return 0
    g = _profile_from(cfg)
    t = args.t
    grid = np.linspace(1.0 / args.grid_points, 1.0 - 1.0 / args.grid_points,
                       args.grid_points - 1)
    from .harness import reference_profile
    vals = reference_profile(regime, params, g, t, grid)
    rows = [[regime.family, t, q, v] for q, v in zip(grid, vals)]
    write_csv(out / "pde.csv", ["family", "t", "q", "rho"], rows)
    print(f"pde: {regime.family} (sigma_hat={F(regime.sigma_hat)}, "
          f"kappa_hat={F(regime.kappa_hat)}, m_hat={F(regime.m_hat)}) "
          f"-> {out / 'pde.csv'}")
    return 0


def cmd_spectrum(args) -> int:
    cfg = _load_config(args)
    out = _outdir(cfg)
    lams = robin_eigenvalues(args.kappa, args.n)
    rows = [[n + 1, lams[n], eigenvalue_residual(lams[n], args.kappa)]
            for n in range(args.n)]
    write_csv(out / "spectrum.csv", ["n", "lambda", "residual"], rows)
    for n, lam, resid in rows:
        print(f"{n} {F(lam)} {F(resid)}")
    return 0


def cmd_regimes(args) -> int:
    kind = NEAREST_NEIGHBOR if args.kernel == "nn" else LONG_JUMP
    if kind == NEAREST_NEIGHBOR:
        rows = [("theta < 1", regime_dispatch(kind, None, 0.0, args.kappa)),
                ("theta = 1", regime_dispatch(kind, None, 1.0, args.kappa)),
                ("theta > 1", regime_dispatch(kind, None, 2.0, args.kappa))]
    else:
        if args.gamma is None:
            print("regimes: --gamma is required for the long-jump kernel",
                  file=sys.stderr)
            return 2
        g = args.gamma
        from .kernels import build_kernel
        kern = build_kernel(LONG_JUMP, 64, gamma=g) if g != 2.0 else None
        c = kern.c_gamma if kern else None
        s2 = kern.sigma2 if kern else None
        if g > 2:
            rows = [(f"theta < {1 - g}", regime_dispatch(kind, g, -g, args.kappa, c, s2)),
                    (f"theta = {1 - g}", regime_dispatch(kind, g, 1 - g, args.kappa, c, s2)),
                    (f"{1 - g} < theta < 1", regime_dispatch(kind, g, 0.0, args.kappa, c, s2)),
                    ("theta = 1", regime_dispatch(kind, g, 1.0, args.kappa, c, s2)),
                    ("theta > 1", regime_dispatch(kind, g, 2.0, args.kappa, c, s2))]
        elif g == 2.0:
            rows = [("any theta", regime_dispatch(kind, g, 0.0, args.kappa))]
        else:
            rows = [("theta < -1", regime_dispatch(kind, g, -2.0, args.kappa, c, s2)),
                    ("theta = -1", regime_dispatch(kind, g, -1.0, args.kappa, c, s2)),
                    ("theta > -1", regime_dispatch(kind, g, 0.0, args.kappa, c, s2))]
    print(f"{'range':22s} {'family':18s} {'sigma^':8s} {'kappa^':10s} {'m^':8s} Theta(N)")
    for label, r in rows:
        scale = f"N^{r.time_scale_exponent:g}" if r.supported else "-"
        print(f"{label:22s} {r.family:18s} {r.sigma_hat:<8.4g} {r.kappa_hat:<10.4g} "
              f"{r.m_hat:<8.4g} {scale}"
              + (f"   [{r.dirichlet_variant}]" if r.dirichlet_variant else "")
              + (f"   ({r.note})" if r.note else ""))
    return 0


def _report_rows(report: ConvergenceReport, params_hash: str) -> list[list]:
    rows = []
    for r in report.rows:
        rows.append([r.experiment, params_hash, f"{r.params_label}|{r.quantity}",
                     r.value, r.tolerance,
                     "" if r.passed is None else str(bool(r.passed)).lower()])
    return rows


def cmd_verify(args) -> int:
    cfg = _load_config(args)
    out = _outdir(cfg)
    cfg.dump(out / "config.resolved")
    seed = int(cfg.get("ensemble.seed", 0))
    replicas = int(cfg.get("ensemble.replicas", 200))
    threads = cfg.get("ensemble.threads")
    base = _params_from(cfg)

    if args.experiment == "hydrodynamic":
        n_list = [int(v) for v in args.N_list.split(",")] if args.N_list else [base.N]
        grid = []
        for N in n_list:
            if base.kernel.kind == NEAREST_NEIGHBOR:
                grid.append(nearest_neighbor_params(N, base.alpha, base.beta,
                                                    base.kappa, base.theta))
            else:
                grid.append(long_jump_params(N, base.kernel.gamma, base.alpha,
                                             base.beta, base.kappa, base.theta))
        profile = _profile_from(cfg)
        times = cfg.times() or (0.05,)
        spec = ExperimentSpec(tuple(grid), profile, tuple(times), replicas, seed,
                              threads=resolve_threads(threads) if threads else None)
        report = hydrodynamic_experiment(spec)
        _verify_figures(out, grid[-1], profile, times)
    elif args.experiment == "hydrostatic":
        thetas = [float(v) for v in args.theta_list.split(",")] if args.theta_list \
            else [base.theta]
        plist = [nearest_neighbor_params(base.N, base.alpha, base.beta, base.kappa, th)
                 for th in thetas]
        report = hydrostatic_experiment(plist, replicas, seed,
                                        threads=resolve_threads(threads) if threads else None)
    else:
        thetas = [float(v) for v in args.theta_list.split(",")] if args.theta_list \
            else [0.0, 1.0, 2.0]
        n_list = [int(v) for v in args.N_list.split(",")] if args.N_list \
            else [32, 64, 128, 256, 512, 1024]
        report = correlation_scan(thetas, n_list, base.alpha, base.beta,
                                  master_seed=seed)
    write_csv(out / "report.csv",
              ["experiment", "param-hash", "norm", "value", "tol", "pass"],
              _report_rows(report, _param_hash(base)))
    print(report.summary())
    print(f"verify: wrote {out / 'report.csv'}")
    # comparison failures are report content, not process errors
    return 0


def _verify_figures(out: Path, params: ModelParams, profile, times) -> None:
    """Profile overlay, correlation heatmap, and the stationary-branches figure."""
    from .harness import exact_profile_reference, reference_profile
    x = params.site_positions()
    regime = dispatch_params(params)
    series = []
    ode = exact_profile_reference(params, profile, list(times))
    for k, t in enumerate(times):
        series.append((x, ode[k], f"mean evolution t={t}"))
        series.append((x, reference_profile(regime, params, profile, t, x),
                       f"{regime.family} t={t}"))
    svgplot.line_plot(series, out / "profiles.svg",
                      title=f"profile overlays (N={params.N})", xlabel="q",
                      ylabel="density")
    if params.kernel.kind == NEAREST_NEIGHBOR and params.kappa == 1.0:
        from .stationary import phi_ss_matrix
        svgplot.heatmap(phi_ss_matrix(params), out / "correlations.svg",
                        title=f"stationary correlations (N={params.N})")
    q = np.linspace(0, 1, 201)
    svgplot.line_plot(
        [(q, macro_profile(q, 0.0, params.kappa, 0.2, 0.8), "fast boundaries"),
         (q, macro_profile(q, 1.0, params.kappa, 0.2, 0.8), "balanced (Robin)"),
         (q, macro_profile(q, 2.0, params.kappa, 0.2, 0.8), "slow boundaries")],
        out / "stationary_branches.svg",
        title="stationary profiles, densities 0.2 / 0.8", xlabel="q", ylabel="density")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    handlers = {"simulate": cmd_simulate, "stationary": cmd_stationary,
                "pde": cmd_pde, "spectrum": cmd_spectrum,
                "verify": cmd_verify, "regimes": cmd_regimes}
    try:
        return handlers[args.command](args)
    except (ConfigError, UnsupportedRegimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        out = getattr(args, "out", None)
        if out:
            Path(out).mkdir(parents=True, exist_ok=True)
            (Path(out) / "diagnostics.txt").write_text(
                f"{exc}\n\n{traceback.format_exc()}")
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
