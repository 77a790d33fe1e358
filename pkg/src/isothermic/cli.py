"""Command line: JSON job configs, OBJ/CSV mesh export and JSON-lines reports.

Exit codes: 0 success, 1 a check failed, 2 the configuration (or an output
path) is unusable.
"""

import argparse
import csv
from dataclasses import dataclass, field
import json
import math
from pathlib import Path
import sys

import numpy as np

from .calapso import HolomorphicFn, corollary_fields
from .diffgeo import grid_points
from .dupin import PRESETS, Case, DupinSpec, build_dupin, constant_names, constraint_residual, curvature_pair, preset_surface, solve_constraint
from .pseudo_metric import Signature
from .verify import CHECKS, SOLUTIONS, calapso_checks, run_checks, validate_checks

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

_ALL_CONSTANTS = ("b", "c", "a11", "a12", "a21", "a22")
_KEYS = {
    "signature",
    "case",
    "domain",
    "grid",
    "checks",
    "solve_for",
    "allow_inadmissible",
    "holomorphic",
    "method",
    "mesh",
    "report",
    *_ALL_CONSTANTS,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class JobConfig:
    signature: tuple
    case: str
    constants: dict
    domain: tuple
    grid: tuple = (21, 21)
    checks: tuple = ()
    solve_for: str = None
    allow_inadmissible: bool = False
    holomorphic: tuple = None
    method: str = "jet"
    mesh: str = None
    report: str = None
    spec: DupinSpec = field(default=None, compare=False, repr=False)

    @property
    def sig(self):
        return Signature(*self.signature)

    def holomorphic_fn(self):
        if self.holomorphic is None:
            raise ConfigError("config has no holomorphic coefficients")
        return HolomorphicFn(tuple(tuple(c) for c in self.holomorphic), self.signature[1])


def _need(cond, message):
    if not cond:
        raise ConfigError(message)


def _sign_list(value, name, length):
    _need(isinstance(value, list) and len(value) == length, f"{name} must be a list of {length} signs")
    _need(all(v in (1, -1) and not isinstance(v, bool) for v in value), f"{name} entries must be +1 or -1")
    return tuple(int(v) for v in value)


def _number(value, name):
    _need(isinstance(value, (int, float)) and not isinstance(value, bool), f"{name} must be a number")
    _need(math.isfinite(value), f"{name} must be finite")
    return float(value)


def _domain(value):
    ok = isinstance(value, list) and len(value) == 2 and all(isinstance(r, list) and len(r) == 2 for r in value)
    _need(ok, "domain must be [[u1_min, u1_max], [u2_min, u2_max]]")
    (a1, b1), (a2, b2) = [[_number(x, "domain bound") for x in r] for r in value]
    _need(a1 < b1 and a2 < b2, "degenerate domain: each interval needs min < max")
    return ((a1, b1), (a2, b2))


def _grid(value):
    ok = isinstance(value, list) and len(value) == 2 and all(isinstance(n, int) and not isinstance(n, bool) for n in value)
    _need(ok, "grid must be [n1, n2] integers")
    _need(min(value) >= 2, "grid too small")
    return tuple(value)


def parse_config(text):
    """Validate a JSON job document and resolve it to a :class:`JobConfig`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed document: {exc}") from None
    _need(isinstance(doc, dict), "malformed document: top level must be an object")
    unknown = sorted(set(doc) - _KEYS)
    _need(not unknown, f"unknown keys: {', '.join(unknown)}")

    grid = _grid(doc.get("grid", [21, 21]))
    checks = doc.get("checks", [])
    if checks == "all":
        checks = list(CHECKS)
    _need(isinstance(checks, list) and all(isinstance(c, str) for c in checks), "checks must be a list of names")
    unknown_checks = [c for c in checks if c not in CHECKS]
    _need(not unknown_checks, f"unknown check(s): {', '.join(unknown_checks)}")
    method = doc.get("method", "jet")
    _need(method in ("jet", "fd"), "method must be 'jet' or 'fd'")
    allow = doc.get("allow_inadmissible", False)
    _need(isinstance(allow, bool), "allow_inadmissible must be true or false")
    for key in ("mesh", "report"):
        _need(doc.get(key) is None or isinstance(doc[key], str), f"{key} must be a path string")

    holo = doc.get("holomorphic")
    if holo is not None:
        ok = isinstance(holo, list) and holo and all(isinstance(c, list) and len(c) == 2 for c in holo)
        _need(ok, "holomorphic must be a non-empty list of [re, im] coefficient pairs")
        holo = tuple((_number(c[0], "coefficient"), _number(c[1], "coefficient")) for c in holo)

    case = doc.get("case")
    given = {k: _number(doc[k], k) for k in _ALL_CONSTANTS if k in doc}
    solve_for = doc.get("solve_for")
    common = dict(
        grid=grid,
        checks=tuple(checks),
        method=method,
        mesh=doc.get("mesh"),
        report=doc.get("report"),
        holomorphic=holo,
        allow_inadmissible=allow,
    )

    if case is None:
        # holomorphic-only job
        _need(holo is not None, "case is required (a preset name or a case tag)")
        _need(not given and solve_for is None, "constants need a case")
        _need("signature" in doc and "domain" in doc, "a holomorphic job needs signature and domain")
        sig = _sign_list(doc["signature"], "signature", 3)
        _need(sig[0] == 1, "holomorphic jobs use eps1 = +1")
        return JobConfig(signature=sig, case="holomorphic", constants={}, domain=_domain(doc["domain"]), **common)

    _need(isinstance(case, str), "case must be a string")
    try:
        if case in PRESETS:
            base = preset_surface(case)
            if "signature" in doc:
                _need(_sign_list(doc["signature"], "signature", 3) == tuple(base.sig.as_list()), f"signature does not match preset {case}")
            domain = _domain(doc["domain"]) if "domain" in doc else base.domain
            unknown_c = sorted(set(given) - set(constant_names(base.case)))
            _need(not unknown_c, f"constants {unknown_c} do not belong to case {base.case.value}")
            spec = DupinSpec(base.case, base.sig, {**base.constants, **given}, domain, name=case)
        else:
            try:
                tag = Case(case)
            except ValueError:
                raise ConfigError(f"unknown case {case!r}; use a preset ({', '.join(PRESETS)}) or a case tag") from None
            _need("signature" in doc, "signature is required")
            _need("domain" in doc, "domain is required for an explicit case")
            sig = Signature(*_sign_list(doc["signature"], "signature", 3))
            names = constant_names(tag)
            unknown_c = sorted(set(given) - set(names))
            _need(not unknown_c, f"constants {unknown_c} do not belong to case {tag.value}")
            consts = dict(given)
            if solve_for is not None and solve_for not in consts:
                consts[solve_for] = 0.0
            missing = [k for k in names if k not in consts]
            _need(not missing, f"missing constants: {', '.join(missing)}")
            spec = DupinSpec(tag, sig, consts, _domain(doc["domain"]), name=case)
        if solve_for is not None:
            _need(isinstance(solve_for, str), "solve_for must be a constant name")
            spec = solve_constraint(spec, solve_for)
        r = constraint_residual(spec)
        _need(allow or abs(r) < 1e-12, f"constraint violation: residual {r:.3e} (set allow_inadmissible to study it)")
        build_dupin(spec, strict=not allow)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    return JobConfig(
        signature=tuple(spec.sig.as_list()),
        case=case,
        constants=dict(spec.constants),
        domain=spec.domain,
        solve_for=solve_for,
        spec=spec,
        **common,
    )


def serialize_config(cfg):
    """JSON text that parses back to an equal :class:`JobConfig`."""
    doc = {"signature": list(cfg.signature), "domain": [list(r) for r in cfg.domain], "grid": list(cfg.grid)}
    if cfg.case != "holomorphic":
        doc["case"] = cfg.case
        doc.update(cfg.constants)
    if cfg.checks:
        doc["checks"] = list(cfg.checks)
    for key in ("solve_for", "mesh", "report"):
        if getattr(cfg, key) is not None:
            doc[key] = getattr(cfg, key)
    if cfg.holomorphic is not None:
        doc["holomorphic"] = [list(c) for c in cfg.holomorphic]
    if cfg.allow_inadmissible:
        doc["allow_inadmissible"] = True
    if cfg.method != "jet":
        doc["method"] = cfg.method
    return json.dumps(doc, indent=2, sort_keys=True)


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return parse_config(text)


# ---------------------------------------------------------------------------
# mesh export


def _fmt(x):
    return format(float(x) + 0.0, ".17g")


def export_mesh(surface, grid, path, mask=None, extras=None):
    """Write an OBJ mesh and a sibling CSV; returns ``(vertices, faces, excluded)``.

    Vertices run row-major with u2 outer and u1 inner.  Points where ``mask``
    is false are dropped together with every quad that touches them.
    ``extras`` maps CSV column names (lambda1, lambda2, omega) to arrays of
    shape ``(n2, n1)``; missing columns are left empty.
    """
    n1, n2 = grid
    U1, U2 = grid_points(surface.domain, n1, n2)
    P = surface(U1, U2)
    keep = np.ones(U1.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    index = np.zeros(U1.shape, dtype=int)
    index[keep] = np.arange(1, int(keep.sum()) + 1)
    extras = extras or {}
    columns = ("lambda1", "lambda2", "omega")

    path = Path(path)
    lines = [f"# isothermic mesh {n1}x{n2}"]
    rows = []
    for j in range(n2):
        for i in range(n1):
            if not keep[j, i]:
                continue
            x, y, z = P[:, j, i]
            lines.append(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}")
            extra = [_fmt(extras[c][j, i]) if c in extras else "" for c in columns]
            rows.append([_fmt(U1[j, i]), _fmt(U2[j, i]), _fmt(x), _fmt(y), _fmt(z), *extra])
    faces = 0
    for j in range(n2 - 1):
        for i in range(n1 - 1):
            quad = (index[j, i], index[j, i + 1], index[j + 1, i + 1], index[j + 1, i])
            if all(quad):
                lines.append("f " + " ".join(str(q) for q in quad))
                faces += 1
    path.write_text("\n".join(lines) + "\n")
    with path.with_suffix(".csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["u1", "u2", "x", "y", "z", *columns])
        writer.writerows(rows)
    return len(rows), faces, int((~keep).sum())


def construct(cfg, out):
    spec = cfg.spec
    built = build_dupin(spec, strict=not cfg.allow_inadmissible)
    pair = curvature_pair(spec, strict=False)
    U1, U2 = grid_points(spec.domain, *cfg.grid)
    extras = {
        "lambda1": np.broadcast_to(pair.h2(U2), U1.shape),
        "lambda2": np.broadcast_to(pair.h1(U1), U1.shape),
    }
    if not cfg.allow_inadmissible:
        extras["omega"] = corollary_fields(spec).omega(U1, U2)
    return export_mesh(built.surface, cfg.grid, out, extras=extras)


# ---------------------------------------------------------------------------
# reports


def write_report(results, grid, path):
    records = [r.to_json(grid) for r in results]
    if path is not None:
        Path(path).write_text("".join(json.dumps(rec) + "\n" for rec in records))
    return records


def run_report(cfg, path=None, method=None):
    """Run the config's checks, write JSON lines, return the records."""
    names = validate_checks(cfg.checks)
    if cfg.spec is None:
        raise ConfigError("verify needs a surface case")
    results = run_checks(cfg.spec, cfg.grid, names, method=method or cfg.method, strict=not cfg.allow_inadmissible)
    return write_report(results, cfg.grid, path if path is not None else cfg.report)


def run_calapso(cfg, solution, path=None, method=None):
    method = method or cfg.method
    if solution == "prop5":
        holo = cfg.holomorphic_fn()
        results = calapso_checks("prop5", cfg.sig, cfg.domain, cfg.grid, holo=holo, method=method)
    else:
        if cfg.spec is None:
            raise ConfigError(f"{solution} needs a surface case")
        results = calapso_checks(solution, cfg.sig, cfg.spec.domain, cfg.grid, spec=cfg.spec, method=method)
    return write_report(results, cfg.grid, path if path is not None else cfg.report)


# ---------------------------------------------------------------------------
# entry point


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--method", choices=("jet", "fd"), default=argparse.SUPPRESS, help="residual evaluation route")
    p = argparse.ArgumentParser(prog="isothermic", parents=[common], description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("construct", parents=[common], help="sample a surface and write OBJ + CSV")
    c.add_argument("--config", required=True)
    c.add_argument("--out", required=True)
    v = sub.add_parser("verify", parents=[common], help="run invariant checks, write JSON lines")
    v.add_argument("--config", required=True)
    v.add_argument("--report")
    k = sub.add_parser("calapso", parents=[common], help="certify a solution family")
    k.add_argument("--config", required=True)
    k.add_argument("--solution", required=True, choices=SOLUTIONS)
    k.add_argument("--report")
    s = sub.add_parser("solve-constraint", parents=[common], help="solve the compatibility condition for one constant")
    s.add_argument("--config", required=True)
    s.add_argument("--free", required=True)
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    method = getattr(args, "method", None)
    try:
        if args.command == "solve-constraint":
            try:
                doc = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            _need(isinstance(doc, dict), "malformed document: top level must be an object")
            cfg = parse_config(json.dumps({**doc, "solve_for": args.free}))
            out = {"case": cfg.case, "free": args.free, "constants": cfg.constants, "residual": constraint_residual(cfg.spec)}
            print(json.dumps(out))
            return EXIT_OK
        cfg = load_config(args.config)
        if args.command == "construct":
            if cfg.spec is None:
                raise ConfigError("construct needs a surface case")
            n_v, n_f, n_x = construct(cfg, args.out)
            print(json.dumps({"mesh": args.out, "vertices": n_v, "faces": n_f, "excluded": n_x}))
            return EXIT_OK
        if args.command == "verify":
            records = run_report(cfg, args.report, method)
        else:
            records = run_calapso(cfg, args.solution, args.report, method)
        for rec in records:
            print(json.dumps(rec))
        return EXIT_OK if all(r["pass"] for r in records) else EXIT_FAIL
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
