"""Command-line front end.

Subcommands: simulate, verify-structure, reduce-pendulum,
analyze-equilibria, control-g4, plot. All numeric output uses 17
significant digits so repeated runs with the same arguments and seed are
byte-identical. Exit codes: 0 success, 1 validation/usage error, 2
numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import g4, pendulum, poly, stability
from .core import (
    ILL_CONDITIONED,
    Params,
    make_params,
    named_realization,
    preset,
    realization,
)
from .errors import (
    MalformedInput,
    NumericalError,
    ValidationError,
)
from .integrate import IntegratorSpec, backend_name, drift_report, integrate

SCHEMA = "mbtop/1"

METHOD_ALIASES = {
    "rk4": "rk4_fixed",
    "rk45": "rk45_adaptive",
    "midpoint": "implicit_midpoint",
}


class UsageError(ValidationError):
    """Unknown flags or unparsable command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage()}")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _default_seed() -> int:
    return int(os.environ.get("MBTOP_SEED", "42"))


def _parse_floats(text, n, what):
    parts = text.split(",")
    if len(parts) != n:
        raise ValidationError(f"{what} needs {n} comma-separated values, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise ValidationError(f"could not parse {what}: {exc}") from exc


def _resolve_params(args) -> Params:
    if args.preset is not None and args.b is not None:
        raise ValidationError("give either --preset or --b, not both")
    if args.preset is not None:
        return preset(args.preset)
    if args.b is not None:
        b = make_params(*_parse_floats(args.b, 3, "--b"))
        for name, v in zip(("b1", "b2", "b3"), b.as_tuple()):
            if abs(v) < ILL_CONDITIONED:
                print(
                    f"warning: |{name}| = {abs(v):g} < {ILL_CONDITIONED:g}; "
                    "parameter ratios are ill-conditioned",
                    file=sys.stderr,
                )
        return b
    raise ValidationError("one of --preset or --b is required")


def _spec_from_args(args) -> IntegratorSpec:
    return IntegratorSpec(
        method=METHOD_ALIASES[args.method],
        step=args.step,
        rtol=args.rtol,
        atol=args.atol,
        newton_tol=args.newton_tol,
        newton_max_iters=args.newton_max_iters,
    )


def _add_params_flags(p):
    p.add_argument("--preset", choices=sorted({"maxwell-bloch", "lorenz-hamilton"}))
    p.add_argument("--b", help="b1,b2,b3")


def _add_integrator_flags(p):
    p.add_argument("--method", choices=sorted(METHOD_ALIASES), default="rk45")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--newton-tol", type=float, default=1e-13)
    p.add_argument("--newton-max-iters", type=int, default=50)
    p.add_argument("--n-out", type=int, default=201)


def _maybe_dump(args, config) -> bool:
    if args.dump_config:
        json.dump(config, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
        return True
    return False


def _write_json(path, payload):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# -- simulate ----------------------------------------------------------


def _cmd_simulate(args) -> int:
    b = _resolve_params(args)
    x0 = _parse_floats(args.x0, 3, "--x0")
    spec = _spec_from_args(args)
    config = {
        "command": "simulate",
        "b": list(b.as_tuple()),
        "x0": x0,
        "t_end": args.t_end,
        "method": args.method,
        "step": args.step,
        "rtol": args.rtol,
        "atol": args.atol,
        "newton_tol": args.newton_tol,
        "newton_max_iters": args.newton_max_iters,
        "n_out": args.n_out,
        "out": args.out,
    }
    if _maybe_dump(args, config):
        return 0
    traj = integrate(b, x0, args.t_end, spec, args.n_out)
    rows = (
        (t, x[0], x[1], x[2], h, c)
        for t, x, h, c in zip(traj.times, traj.states, traj.H_series, traj.C_series)
    )
    _write_csv(args.out, ["t", "x1", "x2", "x3", "H", "C"], rows)
    dH, dC = drift_report(traj)
    print(f"wrote {args.out} ({len(traj)} samples, backend={backend_name()})")
    print(f"drift: dH_max={_fmt(dH)} dC_max={_fmt(dC)}")
    return 0


# -- verify-structure --------------------------------------------------


def _cmd_verify_structure(args) -> int:
    b = _resolve_params(args)
    config = {
        "command": "verify-structure",
        "b": list(b.as_tuple()),
        "seed": args.seed,
        "samples": args.samples,
        "n_realizations": args.n_realizations,
        "out": args.out,
    }
    if _maybe_dump(args, config):
        return 0
    rng = np.random.default_rng(args.seed)
    probes = poly.coordinate_probes()
    checks = []

    def record(name, residual, tol):
        checks.append(
            {
                "axiom": name,
                "residual": residual,
                "tolerance": tol,
                "pass": bool(residual <= tol),
            }
        )

    for label, which in (("base", "base"), ("bar", "bar")):
        P = poly.named_poisson_poly(b, which)
        record(
            f"jacobi identity ({label})",
            max(
                poly.jacobi_residual(P, f, g, h)
                for f in probes
                for g in probes
                for h in probes
            ),
            1e-10,
        )
        cas = poly.poly_H(b) if which == "bar" else poly.poly_C(b)
        record(f"casimir bracket ({label})", poly.casimir_residual(P, cas, probes), 1e-12)
        bundle = named_realization(b, which)
        record(
            f"hamiltonian form ({label})",
            poly.hamiltonian_form_residual(b, bundle, args.samples, args.seed),
            1e-12,
        )
    for i in range(args.n_realizations):
        r = poly.random_unimodular(rng)
        P = poly.poisson_poly(b, r.alpha, r.beta)
        f, g, h = (poly.random_poly(rng) for _ in range(3))
        record(
            f"jacobi identity (random realization {i})",
            poly.jacobi_residual(P, f, g, h),
            1e-10,
        )
        record(
            f"casimir bracket (random realization {i})",
            poly.casimir_residual(P, poly.poly_mixed(b, r.alpha, r.beta), probes),
            1e-12,
        )
        record(
            f"hamiltonian form (random realization {i})",
            poly.hamiltonian_form_residual(b, realization(b, r), args.samples, args.seed + i),
            1e-12,
        )
        record(
            f"leibniz rule (random realization {i})",
            poly.leibniz_residual(P, f, g, h),
            1e-12,
        )
    # negative control: a patched non-Poisson matrix must fail Jacobi
    broken = poly.named_poisson_poly(b, "base").with_entry(
        1, 2, poly.Poly3.var(1) * poly.Poly3.var(2)
    )
    neg = max(
        poly.jacobi_residual(broken, f, g, h)
        for f in probes
        for g in probes
        for h in probes
    )
    checks.append(
        {
            "axiom": "jacobi identity (negative control, patched matrix)",
            "residual": neg,
            "tolerance": 1e-3,
            "pass": bool(neg >= 1e-3),  # must FAIL the identity
        }
    )
    payload = {
        "schema": SCHEMA,
        "config": config,
        "checks": checks,
        "all_pass": all(c["pass"] for c in checks),
    }
    _write_json(args.out, payload)
    return 0 if payload["all_pass"] else 1


# -- reduce-pendulum ---------------------------------------------------


def _cmd_reduce_pendulum(args) -> int:
    b = _resolve_params(args)
    x0 = _parse_floats(args.x0, 3, "--x0")
    spec = _spec_from_args(args)
    config = {
        "command": "reduce-pendulum",
        "b": list(b.as_tuple()),
        "x0": x0,
        "t_end": args.t_end,
        "method": args.method,
        "step": args.step,
        "rtol": args.rtol,
        "atol": args.atol,
        "newton_tol": args.newton_tol,
        "newton_max_iters": args.newton_max_iters,
        "n_out": args.n_out,
        "out": args.out,
    }
    if _maybe_dump(args, config):
        return 0
    ctx = pendulum.make_context(b)
    p0 = pendulum.to_pendulum(ctx, x0)
    times, thetas, theta_dots = pendulum.integrate_pendulum(
        ctx, p0, args.t_end, spec, args.n_out
    )
    rows = []
    for t, th, thd in zip(times, thetas, theta_dots):
        x = pendulum.from_pendulum(ctx, pendulum.PendulumState(th, thd, p0.H))
        level = x[1] ** 2 - (b.b2 / b.b3) * x[2] ** 2
        rows.append((t, th, thd, x[0], x[1], x[2], abs(level - 2.0 * p0.H)))
    _write_csv(
        args.out,
        ["t", "theta", "theta_dot", "x1", "x2", "x3", "residual"],
        rows,
    )
    print(f"wrote {args.out} ({len(rows)} samples, level H={_fmt(p0.H)})")
    return 0


# -- analyze-equilibria ------------------------------------------------


def _eig_json(eigs):
    return [[float(np.real(l)), float(np.imag(l))] for l in eigs]


def _report_json(rep, probe=None):
    payload = {
        "family": rep.family,
        "m": rep.m,
        "point": [float(v) for v in rep.point],
        "eigenvalues": _eig_json(rep.eigenvalues),
        "spectral": rep.spectral,
        "nonlinear": rep.nonlinear,
        "certificate": rep.certificate,
        "ec_lambda0": rep.ec_lambda0,
        "note": rep.note,
    }
    if probe is not None:
        payload["probe"] = {
            "max_excursion": probe.max_excursion,
            "escaped": probe.escaped,
            "eps": probe.eps,
            "warning": probe.warning,
        }
    return payload


def _cmd_analyze_equilibria(args) -> int:
    b = _resolve_params(args)
    m_values = [float(v) for v in args.m.split(",")]
    config = {
        "command": "analyze-equilibria",
        "b": list(b.as_tuple()),
        "m": args.m,
        "probe": args.probe,
        "eps": args.eps,
        "probe_t_end": args.probe_t_end,
        "n_directions": args.n_directions,
        "seed": args.seed,
        "out": args.out,
    }
    if _maybe_dump(args, config):
        return 0
    eqs = [stability.Equilibrium("origin")]
    for m in m_values:
        eqs.append(stability.Equilibrium("e1", m))
        eqs.append(stability.Equilibrium("e3", m))
    reports = []
    for e in eqs:
        rep = stability.nonlinear_classify(b, e)
        probe = None
        if args.probe:
            probe = stability.perturbation_probe(
                b, e, args.eps, args.probe_t_end, args.n_directions, args.seed
            )
        reports.append(_report_json(rep, probe))
    payload = {"schema": SCHEMA, "config": config, "reports": reports}
    _write_json(args.out, payload)
    return 0


# -- control-g4 --------------------------------------------------------


def _cmd_control_g4(args) -> int:
    z0 = _parse_floats(args.z0, 4, "--z0")
    x0 = _parse_floats(args.x0, 4, "--x0")
    cfg = g4.ControlConfig(
        args.c1, args.c2, args.k, args.t_f if args.t_f is not None else math.inf
    )
    spec = _spec_from_args(args)
    config = {
        "command": "control-g4",
        "c1": args.c1,
        "c2": args.c2,
        "k": args.k,
        "t_f": args.t_f,
        "z0": z0,
        "x0": x0,
        "t_end": args.t_end,
        "method": args.method,
        "step": args.step,
        "rtol": args.rtol,
        "atol": args.atol,
        "newton_tol": args.newton_tol,
        "newton_max_iters": args.newton_max_iters,
        "n_out": args.n_out,
        "out_csv": args.out_csv,
        "out_json": args.out_json,
    }
    if _maybe_dump(args, config):
        return 0
    res = g4.reconstruct(cfg, x0, z0, args.t_end, spec, args.n_out)
    ht0, ct0 = g4.g4_invariants(cfg, res.costates[0])
    ht = np.array([g4.g4_invariants(cfg, z)[0] for z in res.costates])
    ct = np.array([g4.g4_invariants(cfg, z)[1] for z in res.costates])
    drift = {
        "z4": float(np.max(np.abs(res.costates[:, 3] - res.costates[0, 3]))),
        "Ht": float(np.max(np.abs(ht - ht0))),
        "Ct": float(np.max(np.abs(ct - ct0))),
    }
    if args.out_csv:
        rows = (
            (t, x[0], x[1], x[2], x[3], z[0], z[1], z[2], u[0], u[1])
            for t, x, z, u in zip(res.times, res.states, res.costates, res.controls)
        )
        _write_csv(
            args.out_csv,
            ["t", "x1", "x2", "x3", "x4", "z1", "z2", "z3", "u1", "u2"],
            rows,
        )
    payload = {
        "schema": SCHEMA,
        "config": config,
        "cost": res.cost,
        "residual": res.residual,
        "drift": drift,
        "reduced_top_params": list(g4.to_mbtop(cfg).as_tuple()),
    }
    _write_json(args.out_json, payload)
    return 0


# -- plot --------------------------------------------------------------

TRAJ_COLUMNS = ["t", "x1", "x2", "x3", "H", "C"]


def _read_traj_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        missing = [c for c in TRAJ_COLUMNS if c not in header]
        if missing:
            raise MalformedInput(f"{path}: missing columns {missing}")
        idx = [header.index(c) for c in TRAJ_COLUMNS]
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                rows.append([float(parts[i]) for i in idx])
            except (ValueError, IndexError) as exc:
                raise MalformedInput(f"{path}:{lineno}: bad row") from exc
    if not rows:
        raise MalformedInput(f"{path}: no data rows")
    return np.array(rows)


def plot(traj_path, out_path) -> int:
    """Render coordinate-plane projections and invariant-drift panels."""
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "mbtop"
    import matplotlib.pyplot as plt

    data = _read_traj_csv(traj_path)
    t, x1, x2, x3, H, C = data.T
    fig, axes = plt.subplots(2, 3, figsize=(12, 7))
    for ax, (u, v, lu, lv) in zip(
        axes[0],
        [(x1, x2, "x1", "x2"), (x1, x3, "x1", "x3"), (x2, x3, "x2", "x3")],
    ):
        ax.plot(u, v, lw=0.8)
        ax.set_xlabel(lu)
        ax.set_ylabel(lv)
        ax.set_title(f"({lu}, {lv}) projection")
    axes[1][0].plot(t, H - H[0], lw=0.8)
    axes[1][0].set_xlabel("t")
    axes[1][0].set_title("H drift")
    axes[1][1].plot(t, C - C[0], lw=0.8)
    axes[1][1].set_xlabel("t")
    axes[1][1].set_title("C drift")
    axes[1][2].plot(t, x1, lw=0.8)
    axes[1][2].set_xlabel("t")
    axes[1][2].set_ylabel("x1")
    axes[1][2].set_title("x1(t)")
    fig.tight_layout()
    fig.savefig(out_path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return 0


def _cmd_plot(args) -> int:
    config = {"command": "plot", "traj": args.traj, "out": args.out}
    if _maybe_dump(args, config):
        return 0
    rc = plot(args.traj, args.out)
    print(f"wrote {args.out}")
    return rc


# -- wiring ------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="mbtop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the top and write a CSV trajectory")
    _add_params_flags(p)
    p.add_argument("--x0", required=True, help="x1,x2,x3")
    p.add_argument("--t-end", type=float, required=True)
    _add_integrator_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify-structure", help="check the Poisson-structure axioms")
    _add_params_flags(p)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--n-realizations", type=int, default=5)
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=_cmd_verify_structure)

    p = sub.add_parser(
        "reduce-pendulum", help="integrate through the pendulum chart and write CSV"
    )
    _add_params_flags(p)
    p.add_argument("--x0", required=True, help="x1,x2,x3 with H0(x0) > 0")
    p.add_argument("--t-end", type=float, required=True)
    _add_integrator_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=_cmd_reduce_pendulum)

    p = sub.add_parser(
        "analyze-equilibria", help="classify equilibria and write a JSON report"
    )
    _add_params_flags(p)
    p.add_argument("--m", default="1,-1", help="comma list of m values")
    p.add_argument("--probe", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--probe-t-end", type=float, default=100.0)
    p.add_argument("--n-directions", type=int, default=8)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", default=None, help="JSON report path (default stdout)")
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=_cmd_analyze_equilibria)

    p = sub.add_parser(
        "control-g4", help="forward optimal-control run on the nilpotent group"
    )
    p.add_argument("--c1", type=float, required=True)
    p.add_argument("--c2", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--t-f", type=float, default=None, help="horizon (default: none)")
    p.add_argument("--z0", required=True, help="z1,z2,z3,z4 (z4 must equal k)")
    p.add_argument("--x0", default="0,0,0,0", help="x1,x2,x3,x4")
    p.add_argument("--t-end", type=float, required=True)
    _add_integrator_flags(p)
    p.add_argument("--out-csv", default=None)
    p.add_argument("--out-json", default=None, help="JSON report path (default stdout)")
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=_cmd_control_g4)

    p = sub.add_parser("plot", help="render a trajectory CSV to SVG")
    p.add_argument("--traj", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dump-config", action="store_true")
    p.set_defaults(func=_cmd_plot)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
