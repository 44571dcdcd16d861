"""Command-line entry point.

One subcommand per toolkit operation, all speaking `.field` documents:

    verify    contact / beltrami / euler / reeb / curlfree checks -> JSON
    reeb      extract the Reeb field of a contact form -> .field
    orbits    section + Newton orbit sweep -> CSV/JSON (+ PNG)
    poincare  section point cloud -> CSV (+ PNG)
    abc       emit an ABC-family document
    giroux    emit a helical normal-form document (form + Reeb field)
    energy    kinetic energy -> JSON
    gauss     homotopy-triviality certificate -> JSON
    adapt     adapted metric/volume for a strict Reeb pair -> JSON (+ .field)

Exit codes: 0 success, 1 input or usage error, 2 negative mathematical
verdict.  JSON output is deterministic: fixed key order, floats at 17
significant digits; rerunning a command on identical input produces
identical bytes (wall time is only recorded under --timing).
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .contact import (BeltramiStatus, ContactVerdict, DegenerateFormError,
                      NotRotationalError, WrongStatusError, adapted_metric,
                      beltrami_factor, contact_from_beltrami, curl_free_case,
                      is_contact, is_euler_steady, reeb_field, verify_reeb)
from .dsl import (FieldSpec, FieldSyntaxError, parse_document, parse_scalar,
                  serialize, serialize_scalar)
from .exprfield import WitnessError
from .forms import SingularFieldError, flat
from .models import ABCParams, abc_field, energy, gauss_certificate, giroux_form, giroux_reeb
from .orbits import orbit_csv_rows, orbit_sweep, poincare, lattice_seeds, section_csv_rows

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NEGATIVE = 2

TOLERANCE_PROFILES = {
    # integrator local error, crossing root, Newton residual, orbit acceptance
    "default": {"tol": 1e-10, "newton": 1e-8, "orbit": 1e-6},
    "sweep": {"tol": 1e-9, "newton": 1e-8, "orbit": 1e-6},
    "fast": {"tol": 1e-8, "newton": 1e-6, "orbit": 1e-4},
}

_CHECKS = ("contact", "beltrami", "euler", "reeb", "curlfree")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the exit-code contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_INPUT)


def _json_scalar(v) -> str:
    import json as _json

    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v) or math.isinf(v):
            return "null"
        return format(v, ".17g")
    if isinstance(v, Fraction):
        return _json.dumps(str(v))
    if isinstance(v, str):
        return _json.dumps(v)
    raise TypeError(f"not JSON-serializable: {type(v).__name__}")


def dump_json(obj, indent: int = 0) -> str:
    pad = " " * indent
    inner = " " * (indent + 2)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [f"{inner}{_json_scalar(str(k))}: {dump_json(v, indent + 2)}"
                for k, v in obj.items()]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        rows = [f"{inner}{dump_json(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    return _json_scalar(obj)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest(subcommand: str, input_path: Path | None, flags: dict,
              timing_started: float | None) -> dict:
    out = {
        "subcommand": subcommand,
        "input_sha256": _sha256(input_path) if input_path else None,
        "flags": {k: flags[k] for k in sorted(flags)},
        "version": __version__,
        "wall_time_s": (round(time.monotonic() - timing_started, 3)
                        if timing_started is not None else None),
    }
    return out


def _load_spec(path_str: str) -> FieldSpec:
    path = Path(path_str)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        sys.stderr.write(f"error: cannot read {path}: {e}\n")
        raise SystemExit(EXIT_INPUT)
    except UnicodeDecodeError as e:
        sys.stderr.write(f"error: {path} is not UTF-8: {e}\n")
        raise SystemExit(EXIT_INPUT)
    try:
        spec = parse_document(text)
    except FieldSyntaxError as e:
        for d in e.diagnostics:
            sys.stderr.write(f"{path}: {d.format(text)}\n")
        raise SystemExit(EXIT_INPUT)
    for w in spec.warnings:
        sys.stderr.write(f"{path}: {w.format(text)}\n")
    return spec


def _emit(text: str, output: str | None):
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _jobs_default() -> int:
    try:
        return max(1, int(os.environ.get("BELTRAMI_JOBS", "1")))
    except ValueError:
        return 1


# -- subcommands -------------------------------------------------------------------


def _cmd_verify(args) -> int:
    started = time.monotonic() if args.timing else None
    spec = _load_spec(args.spec)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    for c in checks:
        if c not in _CHECKS:
            sys.stderr.write(f"error: unknown check {c!r} "
                             f"(choose from {', '.join(_CHECKS)})\n")
            return EXIT_INPUT
    x, g, mu = spec.field, spec.metric, spec.volume
    reports = {}
    all_positive = True
    for check in checks:
        try:
            if check == "beltrami":
                rep = beltrami_factor(x, g, mu, grid_n=args.grid)
                reports[check] = rep.to_json_dict()
                positive = rep.positive()
            elif check == "contact":
                rep = is_contact(flat(x, g), grid_n=args.grid)
                reports[check] = rep.to_json_dict()
                positive = rep.verdict is ContactVerdict.CONTACT
            elif check == "euler":
                rep = is_euler_steady(x, g, mu, grid_n=args.grid)
                reports[check] = rep.to_json_dict()
                positive = rep.positive()
            elif check == "reeb":
                rep = contact_from_beltrami(x, g, mu, grid_n=args.grid)
                reports[check] = rep.to_json_dict()
                positive = rep.reeb_like is not None and rep.reeb_like.ok
            else:  # curlfree
                rep = curl_free_case(x, g, grid_n=args.grid)
                reports[check] = rep.to_json_dict()
                positive = rep.positive()
        except (SingularFieldError, NotRotationalError, WrongStatusError,
                DegenerateFormError, WitnessError) as e:
            reports[check] = {"check": check, "error": str(e)}
            positive = False
        if not positive:
            all_positive = False
    doc = {
        "manifest": _manifest("verify", Path(args.spec),
                              {"checks": args.checks, "grid": args.grid},
                              started),
        "reports": reports,
    }
    _emit(dump_json(doc), args.output)
    return EXIT_OK if all_positive else EXIT_NEGATIVE


def _cmd_reeb(args) -> int:
    spec = _load_spec(args.input)
    if spec.form is not None:
        alpha = spec.form
    else:
        alpha = flat(spec.field, spec.metric)
    if args.verify_only:
        other = _load_spec(args.verify_only)
        try:
            rep = verify_reeb(alpha, other.field, strict=True, grid_n=args.grid)
        except DegenerateFormError as e:
            sys.stderr.write(f"error: {e}\n")
            return EXIT_NEGATIVE
        _emit(dump_json(rep.to_json_dict()), args.output)
        return EXIT_OK if rep.ok else EXIT_NEGATIVE
    try:
        field = reeb_field(alpha, grid_n=args.grid)
    except (DegenerateFormError, WitnessError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_NEGATIVE
    rep = verify_reeb(alpha, field, strict=True, grid_n=args.grid)
    out_spec = FieldSpec(name=f"{spec.name}-reeb", field=field,
                         metric=spec.metric, volume=spec.volume,
                         params={})
    _emit(serialize(out_spec), args.output)
    sys.stderr.write(dump_json(rep.to_json_dict()) + "\n")
    return EXIT_OK if rep.ok else EXIT_NEGATIVE


def _parse_planes(texts):
    axes = {"x": 0, "y": 1, "z": 2}
    planes = []
    for t in texts:
        if "=" not in t:
            raise ValueError(f"plane must look like z=0, got {t!r}")
        a, v = t.split("=", 1)
        a = a.strip().lower()
        if a not in axes:
            raise ValueError(f"plane axis must be x, y or z, got {a!r}")
        planes.append((axes[a], float(v)))
    return planes


def _check_nonsingular(spec: FieldSpec) -> bool:
    return spec.field.nonsingularity_min(spec.metric) > 1e-9


def _cmd_orbits(args) -> int:
    started = time.monotonic() if args.timing else None
    spec = _load_spec(args.spec)
    if not _check_nonsingular(spec):
        sys.stderr.write("error: field is singular on the verification grid; "
                         "orbit search needs a nonsingular field\n")
        return EXIT_INPUT
    profile = TOLERANCE_PROFILES[args.tolerance_profile]
    try:
        planes = _parse_planes(args.plane) if args.plane else None
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    orbits, dropped, sections = orbit_sweep(
        spec.field, planes=planes, seeds_per_plane=args.seeds,
        crossings=args.crossings, tol=profile["tol"], t_max=args.t_max,
        newton_tol=profile["newton"], orbit_tol=profile["orbit"],
        jobs=args.jobs)
    exhausted = sum(1 for s in sections for r in s.records if r.exhausted)
    flags = {
        "planes": ",".join(args.plane) if args.plane else "x=0,y=0,z=0",
        "seeds": args.seeds, "crossings": args.crossings,
        "t_max": args.t_max, "tolerance_profile": args.tolerance_profile,
        "jobs": args.jobs,
    }
    manifest = _manifest("orbits", Path(args.spec), flags, started)
    manifest["seeds_exhausted"] = exhausted
    manifest["partial"] = exhausted > 0
    base = Path(args.output)
    csv_path = base.with_suffix(".csv")
    json_path = base.with_suffix(".json")
    _write_csv(csv_path, orbit_csv_rows(orbits), manifest)
    doc = {
        "manifest": manifest,
        "orbits": [o.to_json_dict() for o in orbits],
        "dropped_candidates": dropped,
        "note": ("absence of contractible orbits in a desk-scale search is "
                 "inconclusive, never a refutation"),
    }
    json_path.write_text(dump_json(doc) + "\n", encoding="utf-8")
    if args.plot:
        from .plots import save_orbit_figure
        save_orbit_figure(orbits, spec.field, base.with_suffix(".png"),
                          tol=profile["tol"], title=f"{spec.name}: periodic orbits")
    sys.stderr.write(f"{len(orbits)} orbits -> {csv_path}, {json_path}"
                     + (f", {base.with_suffix('.png')}" if args.plot else "")
                     + "\n")
    return EXIT_OK


def _cmd_poincare(args) -> int:
    started = time.monotonic() if args.timing else None
    spec = _load_spec(args.spec)
    if not _check_nonsingular(spec):
        sys.stderr.write("error: field is singular on the verification grid\n")
        return EXIT_INPUT
    profile = TOLERANCE_PROFILES[args.tolerance_profile]
    try:
        (axis, value), = _parse_planes([args.plane])
    except ValueError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    seeds = lattice_seeds(axis, value, args.seeds)
    section = poincare(spec.field, axis, value, seeds,
                       crossings=args.crossings, tol=profile["tol"],
                       t_max=args.t_max, jobs=args.jobs)
    flags = {"plane": args.plane, "seeds": args.seeds,
             "crossings": args.crossings, "t_max": args.t_max,
             "tolerance_profile": args.tolerance_profile, "jobs": args.jobs}
    manifest = _manifest("poincare", Path(args.spec), flags, started)
    manifest["total_crossings"] = section.total_crossings
    manifest["grazes"] = sum(r.grazes for r in section.records)
    manifest["seeds_without_crossings"] = sum(
        1 for r in section.records if not r.crossings)
    base = Path(args.output)
    _write_csv(base.with_suffix(".csv"), section_csv_rows(section), manifest)
    if args.plot:
        from .plots import save_section_figure
        save_section_figure(section, base.with_suffix(".png"),
                            title=f"{spec.name}: section {args.plane}")
    sys.stderr.write(f"{section.total_crossings} crossings -> "
                     f"{base.with_suffix('.csv')}"
                     + (f", {base.with_suffix('.png')}" if args.plot else "")
                     + "\n")
    return EXIT_OK


def _write_csv(path: Path, rows, manifest: dict) -> None:
    lines = []
    for key, val in manifest.items():
        if isinstance(val, dict):
            for k2, v2 in val.items():
                lines.append(f"# {key}.{k2}: {v2}")
        else:
            lines.append(f"# {key}: {val}")
    for row in rows:
        lines.append(",".join(row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_fraction(text: str) -> Fraction:
    return Fraction(text)


def _cmd_abc(args) -> int:
    try:
        params = ABCParams(_parse_fraction(args.A), _parse_fraction(args.B),
                           _parse_fraction(args.C))
    except (ValueError, ZeroDivisionError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    from .forms import euclidean_metric, standard_volume
    spec = FieldSpec(
        name=f"abc-{params.A}-{params.B}-{params.C}".replace("/", "_"),
        field=abc_field(params), metric=euclidean_metric(),
        volume=standard_volume(),
        params={"A": params.A, "B": params.B, "C": params.C})
    # emit with symbolic coefficients so the document stays self-describing
    text = [f"name = {spec.name}", "", "[params]", f"A = {params.A}",
            f"B = {params.B}", f"C = {params.C}", "", "[field]",
            "x = A*sin(z) + C*cos(y)", "y = B*sin(x) + A*cos(z)",
            "z = C*sin(y) + B*cos(x)", ""]
    _emit("\n".join(text), args.output)
    return EXIT_OK


def _cmd_giroux(args) -> int:
    if args.n < 1:
        sys.stderr.write("error: the normal-form index must be >= 1\n")
        return EXIT_INPUT
    form = giroux_form(args.n)
    field = giroux_reeb(args.n)
    from .forms import euclidean_metric, standard_volume
    spec = FieldSpec(name=f"giroux-{args.n}", field=field,
                     metric=euclidean_metric(), volume=standard_volume(),
                     params={}, form=form)
    _emit(serialize(spec), args.output)
    return EXIT_OK


def _cmd_energy(args) -> int:
    started = time.monotonic() if args.timing else None
    spec = _load_spec(args.spec)
    res = energy(spec.field, spec.metric, spec.volume)
    doc = {
        "manifest": _manifest("energy", Path(args.spec), {}, started),
        "energy": res.to_json_dict(),
    }
    _emit(dump_json(doc), args.output)
    return EXIT_OK


def _cmd_gauss(args) -> int:
    started = time.monotonic() if args.timing else None
    spec = _load_spec(args.spec)
    try:
        cert = gauss_certificate(spec.field, resolution=args.resolution)
    except SingularFieldError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    doc = {
        "manifest": _manifest("gauss", Path(args.spec),
                              {"resolution": args.resolution}, started),
        "certificate": cert.to_json_dict(),
    }
    _emit(dump_json(doc), args.output)
    return EXIT_OK


def _cmd_adapt(args) -> int:
    started = time.monotonic() if args.timing else None
    spec = _load_spec(args.input)
    if spec.form is None:
        sys.stderr.write("error: adapt needs a document with a [form] section "
                         "(a contact form with its Reeb field)\n")
        return EXIT_INPUT
    try:
        h = parse_scalar(args.h, params=spec.params)
    except FieldSyntaxError as e:
        sys.stderr.write(f"error in --h: {e}\n")
        return EXIT_INPUT
    try:
        result = adapted_metric(spec.form, spec.field, h, grid_n=args.grid)
    except (DegenerateFormError, WitnessError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_NEGATIVE
    doc = {
        "manifest": _manifest("adapt", Path(args.input),
                              {"h": args.h, "grid": args.grid}, started),
        "report": result.to_json_dict(),
    }
    sys.stdout.write(dump_json(doc) + "\n")
    if args.output:
        out_spec = FieldSpec(name=f"{spec.name}-adapted",
                             field=result.scaled_field,
                             metric=result.metric, volume=result.volume,
                             params={})
        Path(args.output).write_text(serialize(out_spec), encoding="utf-8")
    return EXIT_OK


# -- argument wiring ------------------------------------------------------------------


def build_parser() -> _Parser:
    p = _Parser(prog="beltrami",
                description="Exact exterior-calculus checks and periodic-orbit "
                            "searches for flows on the flat 3-torus.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, timing=True):
        if timing:
            sp.add_argument("--timing", action="store_true",
                            help="record wall time in the manifest "
                                 "(off by default to keep outputs byte-stable)")

    sp = sub.add_parser("verify", help="run verification checks on a field")
    sp.add_argument("spec")
    sp.add_argument("--checks", default="beltrami,contact,euler",
                    help=f"comma-separated subset of {','.join(_CHECKS)}")
    sp.add_argument("--grid", type=int, default=32)
    sp.add_argument("-o", "--output", default=None)
    common(sp)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("reeb", help="extract or verify a Reeb field")
    sp.add_argument("input", help=".field document with a [form] section "
                                  "(or a field whose flat 1-form is used)")
    sp.add_argument("--verify-only", default=None, metavar="X.field",
                    help="verify this field against the form instead")
    sp.add_argument("--grid", type=int, default=32)
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=_cmd_reeb)

    sp = sub.add_parser("orbits", help="periodic-orbit sweep")
    sp.add_argument("spec")
    sp.add_argument("--plane", action="append", default=None,
                    help="section plane like z=0 (repeatable; default all three)")
    sp.add_argument("--seeds", type=int, default=6,
                    help="per-plane n x n vertex seed lattice")
    sp.add_argument("--crossings", type=int, default=5)
    sp.add_argument("--t-max", type=float, default=120.0)
    sp.add_argument("--tolerance-profile", choices=sorted(TOLERANCE_PROFILES),
                    default="sweep")
    sp.add_argument("--jobs", type=int, default=_jobs_default())
    sp.add_argument("-o", "--output", default="orbits",
                    help="output base path (writes BASE.csv/.json/.png)")
    plot = sp.add_mutually_exclusive_group()
    plot.add_argument("--plot", dest="plot", action="store_true", default=True)
    plot.add_argument("--no-plot", dest="plot", action="store_false")
    common(sp)
    sp.set_defaults(func=_cmd_orbits)

    sp = sub.add_parser("poincare", help="section point cloud")
    sp.add_argument("spec")
    sp.add_argument("--plane", default="z=0")
    sp.add_argument("--seeds", type=int, default=8)
    sp.add_argument("--crossings", type=int, default=6)
    sp.add_argument("--t-max", type=float, default=150.0)
    sp.add_argument("--tolerance-profile", choices=sorted(TOLERANCE_PROFILES),
                    default="default")
    sp.add_argument("--jobs", type=int, default=_jobs_default())
    sp.add_argument("-o", "--output", default="section",
                    help="output base path (writes BASE.csv/.png)")
    plot = sp.add_mutually_exclusive_group()
    plot.add_argument("--plot", dest="plot", action="store_true", default=True)
    plot.add_argument("--no-plot", dest="plot", action="store_false")
    common(sp)
    sp.set_defaults(func=_cmd_poincare)

    sp = sub.add_parser("abc", help="emit an ABC-family .field document")
    sp.add_argument("A")
    sp.add_argument("B")
    sp.add_argument("C")
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=_cmd_abc)

    sp = sub.add_parser("giroux", help="emit a helical normal-form document")
    sp.add_argument("n", type=int)
    sp.add_argument("-o", "--output", default=None)
    sp.set_defaults(func=_cmd_giroux)

    sp = sub.add_parser("energy", help="kinetic energy of a field")
    sp.add_argument("spec")
    sp.add_argument("-o", "--output", default=None)
    common(sp)
    sp.set_defaults(func=_cmd_energy)

    sp = sub.add_parser("gauss", help="homotopy-triviality certificate")
    sp.add_argument("spec")
    sp.add_argument("--resolution", type=int, default=48)
    sp.add_argument("-o", "--output", default=None)
    common(sp)
    sp.set_defaults(func=_cmd_gauss)

    sp = sub.add_parser("adapt", help="adapted metric for a strict Reeb pair")
    sp.add_argument("input")
    sp.add_argument("--h", default="1", help="positive scaling function")
    sp.add_argument("--grid", type=int, default=32)
    sp.add_argument("-o", "--output", default=None,
                    help="also emit the rescaled field with its metric/volume")
    common(sp)
    sp.set_defaults(func=_cmd_adapt)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except SystemExit as e:
        return int(e.code or 0)
    except FieldSyntaxError as e:
        for d in e.diagnostics:
            sys.stderr.write(d.format(e.source) + "\n")
        return EXIT_INPUT
    except BrokenPipeError:
        return EXIT_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
