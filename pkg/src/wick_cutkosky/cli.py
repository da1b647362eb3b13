"""Command-line front end.

Configuration is a flat ``key = value`` text file; command-line flags override
it.  Recognised keys::

    mode        solve | verify | converge | table1 | table2
    delta       mass asymmetry (required for solve/verify/converge)
    epsilon2    squared normalized energy (required for solve/verify/converge)
    xi          centre-of-mass parameter (default (1 + delta) / 2)
    ell         orbital angular momentum (default 0)
    n_p         radial splines (default depends on epsilon2)
    n_theta     angular functions (default depends on epsilon2)
    c_prime     knot scale (1.0)        c_dprime  knot offset (0.01)
    a           convergence constant (1.0)
    script_n    weighting power, 1 or 3 (1)
    n_gl        Gauss-Legendre order per interval (12)
    n_gc        Gauss-Chebyshev order (auto)
    tol_real    reality tolerance (1e-6)
    n_eigen     eigenvalues reported (6)
    ladder      converge mode basis ladder, "5,10,20" or "5:1,10:1,20:1"
    dump_grid   write grid.tsv with psi, chi_R, chi_I, lhs, rhs (false)
    workers     sweep worker processes (default: available CPUs)
    out_dir     output directory (results)

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 reference mismatch in table1/table2 modes.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import reference
from .assembly import QuadratureRule
from .basis import BasisSpec
from .model import ModelParams
from .spectrum import imag_parts
from .verify import convergence_study, decompose_parity, equation_sides, residual_grid, solve_fields

log = logging.getLogger("wick_cutkosky")

MODES = ("solve", "verify", "converge", "table1", "table2")
SWEEP_AXES = ("epsilon2", "delta", "n_p", "n_theta", "xi", "a", "script_n")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_MISMATCH = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    mode: Optional[str] = None
    delta: Optional[float] = None
    epsilon2: Optional[float] = None
    xi: Optional[float] = None
    ell: int = 0
    n_p: Optional[int] = None
    n_theta: Optional[int] = None
    c_prime: float = 1.0
    c_dprime: float = 0.01
    a: float = 1.0
    script_n: int = 1
    n_gl: int = 12
    n_gc: Optional[int] = None
    tol_real: float = 1e-6
    n_eigen: int = 6
    ladder: Optional[str] = None
    dump_grid: bool = False
    workers: Optional[int] = None
    out_dir: str = "results"

    def validate(self) -> "RunConfig":
        missing = [] if self.mode else ["mode"]
        if self.mode in (None, "solve", "verify", "converge"):
            missing += [k for k in ("delta", "epsilon2") if getattr(self, k) is None]
        if missing:
            raise ConfigError(f"missing required keys: {', '.join(missing)}")
        if self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.n_eigen < 1:
            raise ConfigError(f"n_eigen: must be >= 1, got {self.n_eigen}")
        if self.tol_real <= 0:
            raise ConfigError(f"tol_real: must be > 0, got {self.tol_real}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError(f"workers: must be >= 1, got {self.workers}")
        if self.mode in ("solve", "verify", "converge"):
            self.model_params()
            self.basis_spec()
            self.quadrature().angular_order(self.basis_spec())
            if self.mode == "converge":
                self.ladder_specs()
        return self

    def basis_size(self):
        eps2 = self.epsilon2 if self.epsilon2 is not None else 0.0
        n_p, n_theta = reference.default_basis_size(eps2)
        return self.n_p or n_p, self.n_theta or n_theta

    def model_params(self, **override) -> ModelParams:
        kw = dict(delta=self.delta, epsilon2=self.epsilon2, xi=self.xi, ell=self.ell)
        kw.update(override)
        try:
            return ModelParams.from_epsilon2(**kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def basis_spec(self, **override) -> BasisSpec:
        n_p, n_theta = self.basis_size()
        kw = dict(n_p=n_p, n_theta=n_theta, c_prime=self.c_prime, c_dprime=self.c_dprime, a=self.a, script_n=self.script_n, ell=self.ell)
        kw.update(override)
        try:
            return BasisSpec(**kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def quadrature(self) -> QuadratureRule:
        try:
            return QuadratureRule(n_gl=self.n_gl, n_gc=self.n_gc)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def ladder_specs(self):
        n_p, n_theta = self.basis_size()
        text = self.ladder or f"{max(4, n_p // 4)},{max(4, n_p // 2)},{n_p}"
        specs = []
        for item in text.split(","):
            parts = item.strip().split(":")
            try:
                rung_p = int(parts[0])
                rung_t = int(parts[1]) if len(parts) > 1 else n_theta
            except (ValueError, IndexError) as exc:
                raise ConfigError(f"ladder: cannot parse {item!r}") from exc
            specs.append(self.basis_spec(n_p=rung_p, n_theta=rung_t))
        return specs


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _TYPES[key]
    raw = raw.strip()
    if raw.lower() in ("", "none", "auto") and "Optional" in kind:
        return None
    try:
        if "bool" in kind:
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("true", "1", "yes")
        if "int" in kind:
            value = float(raw)
            if value != int(value):
                raise ValueError(raw)
            return int(value)
        if "float" in kind:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind}") from exc
    return raw


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r} on line {lineno}")
        values[key] = _coerce(key, raw)
    return values


def load_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    values = parse_config_text(Path(path).read_text()) if path else {}
    for key, raw in (overrides or {}).items():
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _coerce(key, raw) if isinstance(raw, str) else raw
    return RunConfig(**values).validate()


def format_config(config: RunConfig) -> str:
    lines = []
    for key, value in asdict(config).items():
        if value is not None:
            lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


@dataclass
class ResultRecord:
    config: dict
    rows: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    basis: dict = field(default_factory=dict)
    status: str = "ok"
    message: str = ""

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ResultRecord":
        return cls(**json.loads(text))

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "results.json").write_text(self.to_json())
        write_rows(out / "results.csv", self.rows)
        return out


CSV_HEAD = ("index", "lambda_re", "lambda_im", "r", "max_resid")


def write_rows(path, rows) -> None:
    extra = sorted({k for row in rows for k in row} - set(CSV_HEAD))
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=[*CSV_HEAD, *extra])
        writer.writeheader()
        for row in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def _verified_rows(params, spec, config: RunConfig, quad, extra=None):
    timings = {}
    t0 = time.perf_counter()
    fields_, spectrum = solve_fields(params, spec, quad, config.n_eigen, config.tol_real)
    timings["solve"] = time.perf_counter() - t0
    imag = imag_parts(spectrum, config.tol_real)
    rows, reports = [], []
    t0 = time.perf_counter()
    for i, fld in enumerate(fields_):
        rep = residual_grid(fld, quad)
        reports.append(rep)
        row = {
            "index": i + 1,
            "lambda_re": float(fld.eigenvalue),
            "lambda_im": float(imag[i]),
            "r": rep.r_lhs_rhs,
            "max_resid": rep.max_rel_resid,
        }
        row.update(extra or {})
        rows.append(row)
    timings["verify"] = time.perf_counter() - t0
    return rows, fields_, reports, timings, spectrum


def _basis_meta(spec: BasisSpec, quad: QuadratureRule) -> dict:
    meta = asdict(spec)
    meta.update(k_max=spec.k_max, size=spec.size, n_gl=quad.n_gl, n_gc=quad.angular_order(spec))
    return meta


def _within(value, exact, tol):
    return abs(value - exact) <= tol * abs(exact)


def _run_solve(config: RunConfig, record: ResultRecord):
    params, spec, quad = config.model_params(), config.basis_spec(), config.quadrature()
    if not wick_window_ok(params):
        log.warning("xi=%.4f lies outside the Wick-rotation window at this energy", params.xi)
    rows, fields_, reports, timings, spectrum = _verified_rows(params, spec, config, quad)
    record.rows, record.timings, record.basis = rows, timings, _basis_meta(spec, quad)
    record.basis["n_real"] = int(len(spectrum.real_subset))
    record.basis["n_total"] = int(len(spectrum))
    out = Path(config.out_dir)
    if config.mode == "verify":
        out.mkdir(parents=True, exist_ok=True)
        for i, rep in enumerate(reports, 1):
            rep.write_text(out / f"verify_{i}.tsv")
            rep.write_json(out / f"verify_{i}.json")
    if config.dump_grid or config.mode == "verify":
        out.mkdir(parents=True, exist_ok=True)
        write_grid(out / "grid.tsv", fields_, quad)


def write_grid(path, fields_, quad) -> None:
    """Plot-ready samples of every solution on the verification grid."""
    from .verify import rectangle_centres

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter="\t")
        writer.writerow(["index", "p", "z", "psi", "chi_R", "chi_I", "lhs", "rhs"])
        for i, fld in enumerate(fields_, 1):
            pc, zc = rectangle_centres(fld.knots)
            lhs, rhs = equation_sides(fld, pc, zc, quad)
            pp, zz = np.meshgrid(pc, zc, indexing="ij")
            chi_r, chi_i = decompose_parity(fld)
            psi = fld(pp, zz)
            for row in zip(pp.ravel(), zz.ravel(), psi.ravel(), chi_r(pp, zz).ravel(), chi_i(pp, zz).ravel(), lhs.ravel(), rhs.ravel()):
                writer.writerow([i, *(f"{v:.10g}" for v in row)])


def wick_window_ok(params: ModelParams) -> bool:
    """Both Euclidean propagator factors stay positive: 2 xi eps < m1 and 2 (1 - xi) eps < m2."""
    eps = params.epsilon
    return 2 * params.xi * eps < params.m1 and 2 * (1 - params.xi) * eps < params.m2


def _run_converge(config: RunConfig, record: ResultRecord):
    params, quad = config.model_params(), config.quadrature()
    t0 = time.perf_counter()
    rungs = convergence_study(params, config.ladder_specs(), config.n_eigen, quad)
    record.timings["converge"] = time.perf_counter() - t0
    for rung in rungs:
        if rung.error:
            record.rows.append({"index": 0, "n_p": rung.n_p, "n_theta": rung.n_theta, "error": rung.error})
            record.status = "partial"
            continue
        for i, (lam, r, res) in enumerate(zip(rung.eigenvalues, rung.r, rung.max_resid), 1):
            record.rows.append({"index": i, "lambda_re": float(lam), "lambda_im": 0.0, "r": float(r), "max_resid": float(res), "n_p": rung.n_p, "n_theta": rung.n_theta})


def _run_table1(config: RunConfig, record: ResultRecord):
    quad = config.quadrature()
    n_p = config.n_p or 20
    ok = True
    for ell, exact in reference.TABLE1.items():
        params = ModelParams(delta=reference.DELTA, epsilon=0.0, xi=config.xi, ell=ell)
        spec = config.basis_spec(n_p=n_p, n_theta=1, ell=ell)
        cfg = replace(config, n_eigen=len(exact))
        rows, *_, timings, _ = _verified_rows(params, spec, cfg, quad, {"ell": ell, "epsilon2": 0.0, "n_p": n_p, "n_theta": 1})
        record.timings[f"ell={ell}"] = sum(timings.values())
        for row, ref in zip(rows, exact):
            row["exact"] = ref
            row["match"] = _within(row["lambda_re"], ref, reference.TABLE1_TOL)
            ok &= row["match"]
        ok &= len(rows) == len(exact)
        record.rows.extend(rows)
    if not ok:
        record.status, record.message = "mismatch", "zero-energy eigenvalues differ from reference"


def _run_table2(config: RunConfig, record: ResultRecord):
    quad = config.quadrature()
    ok = True
    for eps2, (n_p, n_theta, exact, tol) in reference.TABLE2.items():
        params = ModelParams.from_epsilon2(reference.DELTA, eps2, xi=config.xi, ell=0)
        spec = config.basis_spec(n_p=n_p, n_theta=n_theta, ell=0)
        cfg = replace(config, n_eigen=len(exact))
        rows, *_, timings, _ = _verified_rows(params, spec, cfg, quad, {"epsilon2": eps2, "n_p": n_p, "n_theta": n_theta})
        record.timings[f"epsilon2={eps2}"] = sum(timings.values())
        for i, (row, ref) in enumerate(zip(rows, exact)):
            row_tol = reference.TABLE2_GROUND_TOL.get(eps2, tol) if i == 0 else tol
            row["exact"] = ref
            row["match"] = _within(row["lambda_re"], ref, row_tol)
            ok &= row["match"]
        ok &= len(rows) == len(exact)
        record.rows.extend(rows)
    if not ok:
        record.status, record.message = "mismatch", "finite-energy eigenvalues differ from reference"


_MODES = {"solve": _run_solve, "verify": _run_solve, "converge": _run_converge, "table1": _run_table1, "table2": _run_table2}


def run(config: RunConfig, write: bool = True):
    """Execute one configuration; returns (ResultRecord, exit status)."""
    config.validate()
    record = ResultRecord(config=asdict(config))
    try:
        _MODES[config.mode](config, record)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        record.status, record.message = "failed", f"{type(exc).__name__}: {exc}"
        if write:
            record.write(config.out_dir)
        return record, EXIT_NUMERIC
    if write:
        record.write(config.out_dir)
    return record, EXIT_MISMATCH if record.status == "mismatch" else EXIT_OK


def _sweep_point(args):
    config, axis, value = args
    point = replace(config, **{axis: value}, out_dir=str(Path(config.out_dir) / f"{axis}={value}"))
    try:
        point.validate()
        record, status = run(point)
    except ConfigError as exc:
        return value, ResultRecord(config=asdict(point), status="failed", message=str(exc)), EXIT_CONFIG
    return value, record, status


def sweep(config: RunConfig, axis: str, values, workers: Optional[int] = None):
    """Independent runs along one axis; one aggregate ``sweep.csv`` in ``out_dir``."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"axis: must be one of {', '.join(SWEEP_AXES)}, got {axis!r}")
    coerced = [_coerce(axis, str(v)) for v in values]
    workers = workers or config.workers or os.cpu_count() or 1
    jobs = [(config, axis, v) for v in coerced]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            results = list(pool.map(_sweep_point, jobs))
    else:
        results = [_sweep_point(job) for job in jobs]
    rows = []
    for value, record, status in results:
        if not record.rows:
            rows.append({"index": 0, axis: value, "status": record.status, "error": record.message})
        for row in record.rows:
            rows.append({**row, axis: value, "status": record.status})
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(out / "sweep.csv", rows)
    return [record for _, record, _ in results]


def print_record(record: ResultRecord, stream=sys.stdout) -> None:
    print(f"{'#':>3} {'lambda/m^2':>12} {'|Im|':>9} {'1 - r':>10} {'r':>12} {'max_resid':>10}  extra", file=stream)
    for row in record.rows:
        if "lambda_re" not in row:
            print(f"  - {row}", file=stream)
            continue
        extra = {k: v for k, v in row.items() if k not in CSV_HEAD}
        print(
            f"{row['index']:>3} {row['lambda_re']:>12.6g} {row['lambda_im']:>9.2e} {1 - row['r']:>10.3e} "
            f"{row['r']:>12.10f} {row['max_resid']:>10.3e}  {extra if extra else ''}",
            file=stream,
        )
    if record.status != "ok":
        print(f"status: {record.status} {record.message}", file=stream)


def _add_config_flags(parser):
    parser.add_argument("--config", help="key = value configuration file")
    for name in _TYPES:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=f"opt_{name}", metavar="VALUE")


def _overrides(args) -> dict:
    return {k[4:]: v for k, v in vars(args).items() if k.startswith("opt_") and v is not None}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wick-cutkosky", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one configuration")
    _add_config_flags(p_run)
    p_sweep = sub.add_parser("sweep", help="sweep one parameter")
    _add_config_flags(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=SWEEP_AXES)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    try:
        config = load_config(args.config, _overrides(args))
        if args.command == "sweep":
            records = sweep(config, args.axis, [v for v in args.values.split(",") if v.strip()])
            status = EXIT_OK
            for rec in records:
                print(f"== {args.axis} = {rec.config[args.axis]}")
                print_record(rec)
                if rec.status == "failed":
                    status = max(status, EXIT_NUMERIC)
                elif rec.status == "mismatch":
                    status = max(status, EXIT_MISMATCH)
            return status
        record, status = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print_record(record)
    return status


if __name__ == "__main__":
    sys.exit(main())
