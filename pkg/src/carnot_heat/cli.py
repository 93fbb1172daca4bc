"""Command-line front end: ``carnot-heat {solve,compare,barrier,verify-identities}``.

Exit codes: 0 success, 1 configuration or hypothesis error, 2 the run
ended early (blow-up or step budget exhausted), 3 a checked property
was violated.
"""

from __future__ import annotations

import argparse
import functools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .barrier import (
    barrier_function,
    global_bound,
    inflate_L,
    make_barrier,
    mp_operator,
    verify_inequality_39,
)
from .config import build_problem, build_solver_config, load_config
from .errors import ConfigError, InfeasibleError, InvalidArgument, MaxStepsExceeded, PreconditionError
from .group import by_name
from .grid import sobolev_norm, write_csv
from .identities import convergence_study, lindqvist_sweep, odd_power_sweep, stencil_equivalence
from .report import SCHEMA_VERSION, svg_line_chart, write_json, write_series
from .solver import compare, comparison_gronwall, solve_many

__all__ = ["main", "cmd_solve", "cmd_compare", "cmd_barrier", "cmd_verify_identities"]

EXIT_OK, EXIT_CONFIG, EXIT_EARLY, EXIT_VIOLATED = 0, 1, 2, 3
THREADS_ENV = "CARNOT_HEAT_THREADS"


def _guard(fn):
    """Turn configuration and hypothesis errors into exit code 1 with a diagnostic."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, InvalidArgument, PreconditionError, InfeasibleError) as e:
            field = getattr(e, "field", None)
            where = f" [{field}]" if field else ""
            print(f"error{where}: {e}", file=sys.stderr)
            return EXIT_CONFIG

    return wrapper


def _setup(config_path, out, seed, refine):
    if refine < 0:
        raise ConfigError("--refine must be nonnegative", field="refine")
    if not 0 <= seed < 2**64:
        raise ConfigError("--seed must be an unsigned 64-bit integer", field="seed")
    rc = load_config(config_path)
    out = Path(out if out is not None else rc["output.directory"])
    out.mkdir(parents=True, exist_ok=True)
    return rc, out


def _header(command, rc, seed, refine) -> dict:
    echo = {k: v for k, v in rc.echo.items() if k != "output.directory"}
    return {"schema_version": SCHEMA_VERSION, "command": command, "seed": seed, "refine": refine, "config": echo}


def _run(specs, cfg):
    """``solve_many`` that keeps partial results when the step budget runs out."""
    try:
        return solve_many(specs, cfg)
    except MaxStepsExceeded as e:
        return e.trajectory


def _series(spec, traj) -> dict:
    return {
        "time": traj.times.tolist(),
        "sup_norm": traj.sup_norms().tolist(),
        "energy_Jp": [sobolev_norm(spec.group, s, spec.p) for s in traj.states],
    }


def _emit_plots(out: Path, series: dict, prefix: str = ""):
    t = series["time"]
    (out / f"{prefix}sup_norm.svg").write_text(svg_line_chart(t, series["sup_norm"], "sup norm", ylabel="sup |u|"))
    (out / f"{prefix}energy.svg").write_text(svg_line_chart(t, series["energy_Jp"], "energy J_p", ylabel="J_p(u)"))


@_guard
def cmd_solve(config_path=None, out=None, seed: int = 0, refine: int = 0) -> int:
    """Integrate the configured problem and write fields, series and a manifest."""
    rc, out = _setup(config_path, out, seed, refine)
    spec = build_problem(rc, seed, refine)
    cfg = build_solver_config(rc)
    (traj,) = _run([spec], cfg)

    fields_dir = out / "fields"
    fields_dir.mkdir(exist_ok=True)
    stride = max(1, rc["output.stride"])
    fields = []
    for k in range(0, len(traj.times), stride):
        name = f"u_{k:05d}.csv"
        write_csv(traj.states[k], fields_dir / name)
        fields.append({"time": float(traj.times[k]), "file": f"fields/{name}"})
    series = _series(spec, traj)
    write_series(out / "series.csv", series)
    if rc["output.emit_plots"]:
        _emit_plots(out, series)

    manifest = _header("solve", rc, seed, refine)
    manifest.update(
        spec=dict(spec.params(), u0=rc["problem.u0"]),
        solver=cfg.as_dict(),
        status=traj.status,
        blowup_time=traj.blowup_time,
        steps=traj.steps,
        times=series["time"],
        sup_norm=series["sup_norm"],
        energy_Jp=series["energy_Jp"],
        fields=fields,
    )
    write_json(out / "manifest.json", manifest)
    if traj.status != "complete":
        print(f"run ended early: {traj.status} at t={traj.times[-1]:.6g}", file=sys.stderr)
        return EXIT_EARLY
    return EXIT_OK


@_guard
def cmd_compare(config_path=None, scale: float = 0.5, out=None, seed: int = 0, refine: int = 0) -> int:
    """Evolve ``u0`` and ``scale * u0`` together and check that the order persists."""
    rc, out = _setup(config_path, out, seed, refine)
    if not scale > 0:
        raise ConfigError(f"--scale must be positive, got {scale}", field="scale")
    spec_v = build_problem(rc, seed, refine)
    cfg = build_solver_config(rc)
    spec_u = spec_v.with_u0(spec_v.u0.with_values(scale * spec_v.u0.values))
    if np.any(spec_u.u0.values > spec_v.u0.values):
        raise PreconditionError(f"scale={scale} breaks the initial ordering u(0) <= v(0)")
    traj_u, traj_v = _run([spec_u, spec_v], cfg)
    rep = compare(spec_v, cfg, traj_u, traj_v)
    gron = comparison_gronwall(spec_v, traj_u, traj_v)

    report = _header("compare", rc, seed, refine)
    report.update(rep.as_dict())
    report.update(
        scale=scale,
        spec=dict(spec_v.params(), u0=rc["problem.u0"]),
        solver=cfg.as_dict(),
        status=traj_v.status,
        gronwall_report=gron.as_dict(),
    )
    write_json(out / "compare.json", report)
    return EXIT_OK if rep.ordered else EXIT_VIOLATED


@_guard
def cmd_barrier(config_path=None, out=None, seed: int = 0, refine: int = 0) -> int:
    """Build the super-solution barrier, verify it, and check a solve stays below the bound."""
    rc, out = _setup(config_path, out, seed, refine)
    spec = build_problem(rc, seed, refine)
    cfg = build_solver_config(rc)
    p, q, beta = spec.p, spec.q, spec.beta
    if not (p <= q < beta + 1):
        raise PreconditionError(f"barrier requires p <= q < beta+1 (got p={p}, q={q}, beta={beta})")
    if spec.gamma < 1 or spec.alpha > 1:
        raise PreconditionError("barrier requires gamma >= 1 and alpha <= 1")
    g = spec.group
    params = inflate_L(make_barrier(spec.domain, g, p, q, beta, rc["barrier.eps"]), spec.u0)
    ineq = verify_inequality_39(params, p, q, beta, g.horizontal_dim, rc["barrier.samples"])
    V = barrier_function(params, spec.grid)
    mp_min = float(np.min(mp_operator(spec, cfg, V).values))
    (traj,) = _run([spec], cfg)
    bound = global_bound(params)
    max_sup = float(np.max(traj.sup_norms()))

    checks = {
        "barrier_inequality": ineq.ok,
        "mp_nonnegative": mp_min >= 0,
        "solve_completed": traj.status == "complete",
        "below_global_bound": max_sup <= bound,
    }
    failed = next((k for k, ok in checks.items() if not ok), None)
    report = _header("barrier", rc, seed, refine)
    report.update(
        sigma=params.sigma,
        L=params.L,
        x0=list(params.x0_prime),
        eps=params.eps,
        r_prime=params.r_prime,
        global_bound=bound,
        inequality_39_min_margin=ineq.min_margin,
        mp_min_value=mp_min,
        max_sup_norm=max_sup,
        times=traj.times.tolist(),
        sup_norm=traj.sup_norms().tolist(),
        status=traj.status,
        checks=checks,
        failed_check=failed,
    )
    write_json(out / "barrier.json", report)
    if failed:
        print(f"barrier check failed: {failed}", file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def _workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", field=THREADS_ENV) from None
    if n < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", field=THREADS_ENV)
    return n


@_guard
def cmd_verify_identities(config_path=None, out=None, seed: int = 0, refine: int = 0) -> int:
    """Convergence of the closed-form identities plus the inequality sweeps, as a table."""
    rc, out = _setup(config_path, out, seed, refine)
    try:
        g = by_name(rc["verify.group"])
    except InvalidArgument as e:
        raise ConfigError(f"verify.group: {e}", field="verify.group") from None
    n = rc["verify.n_coarse"] * 2**refine
    m = rc["verify.samples"]
    jobs = {("gradient", 3.0): None}
    for gam in (1.0, 3.0):
        if gam != g.horizontal_dim:
            jobs[("divergence", gam)] = None
    with ThreadPoolExecutor(max_workers=_workers()) as pool:
        futs = {key: pool.submit(convergence_study, key[0], key[1], g, -1.0, 1.0, n) for key in jobs}
        f_lq = pool.submit(lindqvist_sweep, m, seed=seed)
        f_op = pool.submit(odd_power_sweep, m, seed=seed)
        f_st = pool.submit(lambda: all(stencil_equivalence(d) for d in (1, 2, 3)))
        studies = [futs[key].result() for key in jobs]
        lq, op, st = f_lq.result(), f_op.result(), f_st.result()

    print(f"{'check':<26}{'gamma':>6}{'err(h)':>12}{'err(h/2)':>12}{'order':>8}  pass")
    for s in studies:
        print(f"{s.identity + ' identity':<26}{s.gamma:>6g}{s.errors[0]:>12.3e}{s.errors[1]:>12.3e}{s.order:>8.2f}  {s.passed}")
    print(f"{'lindqvist min margin':<26}{'':>6}{lq['min_scaled_margin']:>12.3e}{'':>20}  {lq['passed']}")
    print(f"{'odd-power mismatches':<26}{'':>6}{op['mismatches']:>12d}{'':>20}  {op['passed']}")
    print(f"{'p=2 stencil exact match':<26}{'':>6}{str(st):>12}{'':>20}  {st}")

    passed = all(s.passed for s in studies) and lq["passed"] and op["passed"] and st
    report = _header("verify-identities", rc, seed, refine)
    report.update(
        group=g.name,
        studies=[s.as_dict() for s in studies],
        lindqvist=lq,
        odd_power=op,
        stencil_exact_match=st,
        passed=passed,
    )
    write_json(out / "identities.json", report)
    return EXIT_OK if passed else EXIT_VIOLATED


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="carnot-heat", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key = value config file (defaults apply when omitted)")
        p.add_argument("--out", help="output directory (overrides output.directory)")
        p.add_argument("--seed", type=int, default=0, help="seed for random initial data and sweeps")
        p.add_argument("--refine", type=int, default=0, help="halve h (and hence dt) this many times")
        return p

    common(sub.add_parser("solve", help="integrate the configured problem"))
    cp = common(sub.add_parser("compare", help="check u(0) = scale*v(0) stays below v"))
    cp.add_argument("--scale", type=float, default=0.5)
    common(sub.add_parser("barrier", help="verify the global-in-time barrier bound"))
    common(sub.add_parser("verify-identities", help="convergence of the closed-form identities"))
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    common = dict(config_path=args.config, out=args.out, seed=args.seed, refine=args.refine)
    if args.command == "solve":
        return cmd_solve(**common)
    if args.command == "compare":
        return cmd_compare(scale=args.scale, **common)
    if args.command == "barrier":
        return cmd_barrier(**common)
    return cmd_verify_identities(**common)


if __name__ == "__main__":
    raise SystemExit(main())
