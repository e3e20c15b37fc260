"""Command-line interface: ``ur analyze|example|sweep|fuzz|covariance``.

Exit codes: 0 when every checked relation holds, 2 when one fails (the
matrix inequality in particular), 1 on usage or input errors.
"""

import argparse
import os
import json
import logging
import math
import re
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .builtin import BUILTIN, bae_model, cnot_model, identity_model
from .config import resolve_tolerances
from .errors import SchemaError, URError
from .fuzz import run_campaign
from .gaussian import COUNTEREXAMPLE_PROBE_COV, VACUUM_COV
from .measurement import analyze, oup_matrix
from .modelfile import dump_model, load_model, model_to_doc
from .operators import psd_check
from .render import table_text, to_json, to_text, verdict_lines
from .symplectic import gexp_scale, random_symplectic, rotated_ozawa_from_matrices, transform_nd

log = logging.getLogger("ur")

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2
PROBES = {"counterexample": COUNTEREXAMPLE_PROBE_COV, "vacuum": VACUUM_COV}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # argparse's default status 2 would collide with the violation code
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit(text, output=None):
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tolerances(args, file_overrides=None):
    tol = resolve_tolerances(None)
    if file_overrides:
        tol = replace(tol, **file_overrides)
    if getattr(args, "tol", None) is not None:
        tol = tol.with_all(args.tol)
    return tol


def report_document(model, tol, seed=None, started=None):
    t0 = time.perf_counter() if started is None else started
    report = analyze(model, tol)
    doc = {
        "tool": "ur",
        "version": __version__,
        "seed": seed,
        "tolerances": tol.as_dict(),
        "model": model_to_doc(model),
        "report": report.as_dict(),
    }
    doc["duration_s"] = time.perf_counter() - t0
    return report, doc


def _render_report(doc, fmt):
    if fmt == "json":
        return to_json(doc) + "\n"
    return to_text(doc, verdict_lines(doc["report"]))


def cmd_analyze(args):
    started = time.perf_counter()
    model, overrides, seed = load_model(args.file)
    tol = _tolerances(args, overrides)
    report, doc = report_document(model, tol, seed, started)
    _emit(_render_report(doc, args.format), args.output)
    return report.exit_code


def build_example(name, gain=1.0, probe="counterexample"):
    if name not in BUILTIN:
        raise UsageError(f"unknown example {name!r}; choose from {', '.join(sorted(BUILTIN))}")
    if name == "bae":
        return bae_model(gain, probe_cov=PROBES[probe])
    return identity_model() if name == "identity" else cnot_model()


def cmd_example(args):
    started = time.perf_counter()
    model = build_example(args.name, args.gain, args.probe)
    tol = _tolerances(args)
    if args.emit_model:
        dump_model(model, args.emit_model)
    report, doc = report_document(model, tol, None, started)
    _emit(_render_report(doc, args.format), args.output)
    return report.exit_code


SWEEP_COLUMNS = ["gain", "epsilon", "eta", "epsilon_eta", "min_eigenvalue", "determinant",
                 "matrix_oup", "ozawa", "heisenberg", "probe_physical"]


def sweep_rows(name, lo, hi, steps, probe="counterexample", tol=None):
    if name != "bae":
        raise UsageError(f"only 'bae' has a sweepable parameter, got {name!r}")
    if steps < 1:
        raise UsageError("steps must be positive")
    if not (0 < lo <= hi):
        raise UsageError(f"need 0 < min <= max, got [{lo}, {hi}]")
    tol = tol or resolve_tolerances(None)
    rows = []
    for g in np.linspace(lo, hi, steps):
        rep = analyze(bae_model(float(g), probe_cov=PROBES[probe]), tol)
        p = rep.pairs[0]
        rows.append({
            "gain": float(g), "epsilon": p.epsilon, "eta": p.eta, "epsilon_eta": p.epsilon * p.eta,
            "min_eigenvalue": rep.matrix_oup.min_eigenvalue, "determinant": rep.matrix_oup.determinant,
            "matrix_oup": rep.matrix_oup.is_psd, "ozawa": p.ozawa.holds, "heisenberg": p.heisenberg.holds,
            "probe_physical": rep.physicality["probe"].is_psd,
            "_exit": rep.exit_code,
        })
    return rows


def cmd_sweep(args):
    if args.param != "gain":
        raise UsageError(f"unknown parameter {args.param!r}; only 'gain' is supported")
    rows = sweep_rows(args.name, args.min, args.max, args.steps, args.probe, _tolerances(args))
    code = max(r.pop("_exit") for r in rows)
    if args.format == "json":
        _emit(to_json({"name": args.name, "param": "gain", "columns": SWEEP_COLUMNS, "rows": rows}) + "\n",
              args.output)
    else:
        _emit(table_text(SWEEP_COLUMNS, rows), args.output)
    return code


def _parse_dims(text):
    m = re.fullmatch(r"(\d+)[xX](\d+)", text or "")
    if not m:
        raise UsageError(f"--dims must look like DxD, got {text!r}")
    dims = int(m.group(1)), int(m.group(2))
    if min(dims) < 1:
        raise UsageError("dimensions must be positive")
    return dims


def cmd_fuzz(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    seed = args.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2 ** 63))
        log.warning("no --seed given; using %d", seed)
    dims = _parse_dims(args.dims) if args.backend == "finite" else (0, 0)
    if args.backend == "gaussian" and args.modes < 1:
        raise UsageError("--modes must be positive")
    summary = run_campaign(args.backend, dims, args.modes, args.trials, seed, n=args.n,
                           lambdas=args.lambdas, include_counterexample=args.include_counterexample,
                           jobs=args.jobs, tol=_tolerances(args))
    if args.format == "json":
        text = to_json(summary) + "\n"
    else:
        slim = {k: v for k, v in summary.items() if k != "extremal"}
        text = to_text(slim)
    _emit(text, args.output)
    if args.replay_dir:
        os.makedirs(args.replay_dir, exist_ok=True)
        ext = summary["extremal"]
        docs = ([("tightest", ext["tightest_physical"])] if ext["tightest_physical"] else [])
        docs += [(f"violation-{i}", d) for i, d in enumerate(ext["violations"])]
        docs += [(f"unphysical-{i}", d) for i, d in enumerate(ext["unphysical_violations"])]
        for label, d in docs:
            with open(os.path.join(args.replay_dir, f"{label}.json"), "w") as fh:
                json.dump(d, fh, indent=1)
    return EXIT_VIOLATION if summary["physical_violations"] else EXIT_OK


def parse_angle(text):
    """Accept plain numbers and multiples of pi such as ``pi/4`` or ``0.5*pi``."""
    t = text.replace(" ", "").lower()
    try:
        return float(t)
    except ValueError:
        pass
    m = re.fullmatch(r"(-?[0-9.]*)\*?pi(?:/([0-9.]+))?", t)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    coef = m.group(1)
    coef = -1.0 if coef == "-" else float(coef) if coef else 1.0
    return coef * math.pi / (float(m.group(2)) if m.group(2) else 1.0)


def covariance_document(model, tol, angle=None, random_s=0, seed=0):
    rep = analyze(model, tol)
    doc = {"tool": "ur", "version": __version__, "model": model_to_doc(model),
           "K": rep.K.tolist(), "Gamma": rep.Gamma.tolist(), "Gexp": rep.Gexp.tolist()}
    gmax = max(1.0, float(np.max(np.abs(rep.Gexp))))
    premise = (float(np.max(np.abs(rep.Gamma))) <= tol.hermitian * gmax
               and gexp_scale(rep.Gexp, tol.hermitian) is not None)
    doc["premise_applies"] = premise
    if angle is not None:
        doc["rotation"] = rotated_ozawa_from_matrices(rep.K, rep.Gamma, rep.Gexp, angle, tol).as_dict()
    if random_s:
        before = rep.matrix_oup
        samples = []
        children = np.random.SeedSequence(seed).spawn(random_s)
        for child in children:
            s = random_symplectic(rep.n, child)
            t = transform_nd(s, rep.K, rep.Gamma, rep.Gexp, tol.hermitian)
            after = psd_check(oup_matrix(t.K, t.Gamma, t.Gexp), tol=tol.psd)
            samples.append({"is_psd": after.is_psd, "min_eigenvalue": after.min_eigenvalue,
                            "gexp_invariant": t.gexp_invariant})
        doc["random_s"] = {
            "count": random_s, "seed": seed,
            "before": before.as_dict(),
            "verdict_changes": sum(x["is_psd"] != before.is_psd for x in samples),
            "samples": samples,
        }
    return doc


def cmd_covariance(args):
    model, overrides, file_seed = load_model(args.file)
    tol = _tolerances(args, overrides)
    angle = args.angle
    if angle is None and not args.random_s:
        angle = math.pi / 4
    seed = args.seed if args.seed is not None else (file_seed or 0)
    doc = covariance_document(model, tol, angle, args.random_s, seed)
    _emit(to_json(doc) + "\n" if args.format == "json" else to_text(doc), args.output)
    changes = doc.get("random_s", {}).get("verdict_changes", 0)
    return EXIT_VIOLATION if (doc["premise_applies"] and changes) else EXIT_OK


def build_parser():
    p = _Parser(prog="ur", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ur {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json")):
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--tol", type=float, default=None, help="override every tolerance")
        sp.add_argument("--output", "-o", default=None, help="write to a file instead of stdout")

    a = sub.add_parser("analyze", help="analyze a model file")
    a.add_argument("file")
    common(a)
    a.set_defaults(func=cmd_analyze)

    e = sub.add_parser("example", help="analyze a built-in model")
    e.add_argument("name", help="bae, identity or cnot")
    e.add_argument("--gain", type=float, default=1.0)
    e.add_argument("--probe", choices=sorted(PROBES), default="counterexample",
                   help="probe covariance for bae")
    e.add_argument("--emit-model", default=None, metavar="PATH")
    common(e)
    e.set_defaults(func=cmd_example)

    s = sub.add_parser("sweep", help="sweep a built-in model over a parameter")
    s.add_argument("name")
    s.add_argument("--param", default="gain")
    s.add_argument("--min", type=float, required=True)
    s.add_argument("--max", type=float, required=True)
    s.add_argument("--steps", type=int, required=True)
    s.add_argument("--probe", choices=sorted(PROBES), default="counterexample")
    common(s)
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("fuzz", help="random-model campaign")
    f.add_argument("--backend", choices=("finite", "gaussian"), default="finite")
    f.add_argument("--dims", default="2x2", help="object x probe dimensions, finite backend")
    f.add_argument("--modes", type=int, default=1, help="modes per side, gaussian backend")
    f.add_argument("--trials", type=int, default=100)
    f.add_argument("--seed", type=int, default=None)
    f.add_argument("--n", type=int, default=1, help="observables per side, finite backend")
    f.add_argument("--lambdas", type=int, default=100, help="probe vectors per trial")
    f.add_argument("--include-counterexample", action="store_true",
                   help="append the amplifier with its unphysical probe moments")
    f.add_argument("--jobs", type=int, default=1)
    f.add_argument("--replay-dir", default=None, help="write extremal models as model files")
    common(f, formats=("json", "text"))
    f.set_defaults(func=cmd_fuzz)

    c = sub.add_parser("covariance", help="symplectic covariance experiments")
    c.add_argument("file")
    c.add_argument("--angle", type=parse_angle, default=None)
    c.add_argument("--random-s", type=int, default=0, metavar="N")
    c.add_argument("--seed", type=int, default=None)
    common(c)
    c.set_defaults(func=cmd_covariance)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="ur: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"ur: invalid model file: {exc}", file=sys.stderr)
    except (URError, UsageError, ValueError, OSError) as exc:
        print(f"ur: error: {exc}", file=sys.stderr)
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
