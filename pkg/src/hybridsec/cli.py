"""Command-line front end: ``hybridsec {sweep-n,sweep-phi,optimize-phi,validate}``."""

import argparse
import csv
import io
import os
import sys
import tempfile

import numpy as np

from .channel import validate_config
from .config import load_experiment
from .errors import ConfigError, DomainError
from .metrics import eve_capacity_bound, secrecy_rate_bound
from .montecarlo import EnsembleSpec, run_ensemble
from .optimizer import PhiSearchSpec, optimize_phi, phi_grid
from .validation import run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

SWEEP_N_HEADER = ["N", "scheme", "secrecy_cf", "secrecy_mc", "secrecy_mc_stderr",
                  "rate_cf", "rate_mc", "eve_bound", "eve_mc"]
SWEEP_PHI_HEADER = ["L", "scheme", "phi", "secrecy_cf", "bound_valid"]
OPTIMIZE_HEADER = ["scheme", "L", "phi", "secrecy_cf"]


def fmt(x):
    """Locale-independent round-trip float formatting."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temp file in the same directory; no partial file survives."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def _warn(msg):
    print(f"warning: {msg}", file=sys.stderr)


def sweep_n(exp, out):
    rows = []
    for n in exp.N:
        cfg = exp.system_config(N=n)
        for scheme in exp.schemes:
            spec = EnsembleSpec(cfg, scheme, exp.trials, exp.seed, eve=True,
                                ins_tol=exp.ins_tol, ins_max_iter=exp.ins_max_iter)
            res = run_ensemble(spec, exp.workers)
            if res.unreliable:
                _warn(f"N={n} {scheme}: {res.failures} of {exp.trials} trials dropped {res.failure_reasons}")
            r = res.rate_report
            se = float(np.sqrt(np.sum(r.secrecy_mc_stderr ** 2))) / cfg.K
            rows.append([n, scheme, np.mean(r.secrecy_cf), np.mean(r.secrecy_mc), se,
                         np.mean(r.rate_cf), np.mean(r.rate_mc), r.eve_bound, np.mean(r.eve_mc)])
    _emit(csv_text(SWEEP_N_HEADER, rows), out)
    return EXIT_OK


def sweep_phi(exp, out):
    phis = exp.phi if len(exp.phi) > 1 else list(phi_grid(exp.phi_step))
    rows = []
    for L in exp.L:
        for scheme in exp.schemes:
            for phi in phis:
                cfg = exp.system_config(L=L, phi=float(phi))
                bad = validate_config(cfg)
                if bad:
                    raise ConfigError(bad)
                try:
                    eve_capacity_bound(cfg)
                    valid = True
                except DomainError:
                    valid = False
                sec = float(np.mean([secrecy_rate_bound(scheme, cfg, k) for k in range(cfg.K)])) if valid else 0.0
                rows.append([L, scheme, float(phi), sec, valid])
    _emit(csv_text(SWEEP_PHI_HEADER, rows), out)
    return EXIT_OK


def optimize(exp, out):
    rows, summary = [], ["scheme,L,phi_star,secrecy_star"]
    for L in exp.L:
        for scheme in exp.schemes:
            cfg = exp.system_config(L=L)
            res = optimize_phi(PhiSearchSpec(cfg, scheme, exp.grid_step, exp.refine))
            rows += [[scheme, L, p, s] for p, s in res.curve]
            summary.append(",".join([str(scheme), str(L), fmt(res.phi_star), fmt(res.secrecy_star)]))
            if res.zero_secrecy:
                _warn(f"{scheme} L={L}: secrecy bound is zero on the whole grid")
    text = csv_text(OPTIMIZE_HEADER, rows)
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)
    print("\n".join(summary))
    return EXIT_OK


def validate(exp, out):
    cfg = exp.system_config()
    checks = run_checks(cfg, exp.trials, exp.seed, exp.workers, exp.tolerances, exp.ins_tol, exp.ins_max_iter)
    failed = [c for c in checks if not c.passed]
    lines = [c.line() for c in checks]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    report = "\n".join(lines) + "\n"
    sys.stdout.write(report)
    if out is not None:
        write_atomic(out, report)
    return EXIT_VALIDATION if failed else EXIT_OK


COMMANDS = {"sweep-n": sweep_n, "sweep-phi": sweep_phi, "optimize-phi": optimize, "validate": validate}


def build_parser():
    parser = argparse.ArgumentParser(prog="hybridsec", description="Secure hybrid-precoding simulator.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--seed", type=int, help="master seed (u64)")
        p.add_argument("--trials", type=int, help="Monte Carlo trials per point")
        p.add_argument("--out", help="output path (stdout when omitted)")
        p.add_argument("--workers", type=int, help="worker processes")
    return parser


def _load(args):
    exp = load_experiment(args.command, args.config)
    for key in ("seed", "trials", "workers"):
        val = getattr(args, key)
        if val is not None:
            setattr(exp, key, val)
    if not 0 <= exp.seed < 2 ** 64:
        raise ConfigError("seed must be a u64")
    if exp.trials < 1 or exp.workers < 1:
        raise ConfigError("trials >= 1 and workers >= 1")
    return exp


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        exp = _load(args)
    except ConfigError as exc:
        print(f"config error: {'; '.join(exc.violations)}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](exp, args.out)
    except ConfigError as exc:
        if args.command == "validate":
            # an invalid system is itself a validation finding
            report = "".join(f"FAIL config: {v}\n" for v in exc.violations)
            sys.stdout.write(report)
            if args.out:
                write_atomic(args.out, report)
            return EXIT_VALIDATION
        print(f"config error: {'; '.join(exc.violations)}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, RuntimeError, FloatingPointError, DomainError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
