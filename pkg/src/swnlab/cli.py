"""Command-line entry point: configuration, subcommands, report emission.

Subcommands: ``commutators``, ``wick``, ``moments``, ``proofchain``,
``distributions``, ``all``.  Every run writes a JSON array of check
records (and/or a CSV summary) under the output directory and exits 0 iff
every check passed, 1 on check failures, 2 on configuration errors.

The configuration file is flat ``key = value`` text, UTF-8, with ``#``
comments.  Unknown keys are rejected.  Named test functions use the key
pattern ``phi.<name> = v1, v2, ...``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import crosscheck, jacobimeixner as jm, wick
from .crosscheck import CheckReport


class ConfigError(ValueError):
    """Bad configuration file or flag combination."""


_DEFAULT_BETAS = (0.0, 1.0, 2.0, 3.0, 5.0)
_DEFAULT_SEEDS = tuple(range(101, 111))
_DEFAULT_COMMUTATOR_GRIDS = ((1, 1.0), (2, 1.0), (3, 0.5))
_DEFAULT_MOMENT_GRIDS = ((1, 1.0), (3, 0.5))


@dataclass(frozen=True)
class RunConfig:
    """Resolved run parameters; every field has a working default."""

    betas: Tuple[float, ...] = _DEFAULT_BETAS
    seeds: Tuple[int, ...] = _DEFAULT_SEEDS
    commutator_grids: Tuple[Tuple[int, float], ...] = _DEFAULT_COMMUTATOR_GRIDS
    moment_grids: Tuple[Tuple[int, float], ...] = _DEFAULT_MOMENT_GRIDS
    k_max: int = 8
    gram_orders: int = 6
    marginal_areas: Tuple[float, ...] = (0.5, 1.0, 2.0)
    atom_masses: Tuple[float, ...] = (0.5, 1.0, 2.0)
    phis: Dict[str, Tuple[float, ...]] = field(default_factory=dict)
    tol_commutators: float = 1e-10
    tol_adjoint: float = 1e-10
    tol_moments: float = 1e-8
    tol_spectral: float = 1e-6
    tol_spectral_gamma: float = 1e-10
    tol_gram: float = 1e-6
    tol_marginal: float = 1e-6
    tol_single_atom: float = 1e-8
    table_points: int = 201
    out_dir: str = "reports"
    out_format: str = "json"

    def validate(self) -> None:
        for name in (
            "tol_commutators",
            "tol_adjoint",
            "tol_moments",
            "tol_spectral",
            "tol_spectral_gamma",
            "tol_gram",
            "tol_marginal",
            "tol_single_atom",
        ):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if any(b < 0 for b in self.betas):
            raise ConfigError("beta values must be >= 0")
        if self.k_max < 0:
            raise ConfigError("kmax must be >= 0")
        if self.table_points < 2:
            raise ConfigError("table_points must be at least 2")
        for atoms, mass in self.commutator_grids + self.moment_grids:
            if atoms < 1 or not mass > 0:
                raise ConfigError("grids need at least one atom and positive cell mass")
        if self.out_format not in ("json", "csv", "both"):
            raise ConfigError("format must be json, csv, or both")


def _parse_floats(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad float list {text!r}: {exc}") from None


def _parse_ints(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(x.strip()) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}") from None


def _parse_grids(text: str) -> Tuple[Tuple[int, float], ...]:
    grids = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ConfigError(f"grid spec {chunk!r} is not 'atoms,cell_mass'")
        try:
            grids.append((int(parts[0]), float(parts[1])))
        except ValueError as exc:
            raise ConfigError(f"bad grid spec {chunk!r}: {exc}") from None
    if not grids:
        raise ConfigError("empty grid list")
    return tuple(grids)


_SCALAR_KEYS = {
    "kmax": ("k_max", int),
    "gram_orders": ("gram_orders", int),
    "table_points": ("table_points", int),
    "out_dir": ("out_dir", str),
    "format": ("out_format", str),
    "tol_commutators": ("tol_commutators", float),
    "tol_adjoint": ("tol_adjoint", float),
    "tol_moments": ("tol_moments", float),
    "tol_spectral": ("tol_spectral", float),
    "tol_spectral_gamma": ("tol_spectral_gamma", float),
    "tol_gram": ("tol_gram", float),
    "tol_marginal": ("tol_marginal", float),
    "tol_single_atom": ("tol_single_atom", float),
}
_LIST_KEYS = {
    "betas": ("betas", _parse_floats),
    "seeds": ("seeds", _parse_ints),
    "marginal_areas": ("marginal_areas", _parse_floats),
    "atom_masses": ("atom_masses", _parse_floats),
    "commutator_grids": ("commutator_grids", _parse_grids),
    "moment_grids": ("moment_grids", _parse_grids),
}


def load_config(path: str) -> RunConfig:
    """Parse the flat key-value config file; unknown keys are rejected."""
    updates: Dict[str, object] = {}
    phis: Dict[str, Tuple[float, ...]] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("phi."):
            name = key[4:]
            if not name:
                raise ConfigError(f"{path}:{lineno}: empty test-function name")
            phis[name] = _parse_floats(value)
        elif key in _SCALAR_KEYS:
            attr, conv = _SCALAR_KEYS[key]
            try:
                updates[attr] = conv(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
        elif key in _LIST_KEYS:
            attr, conv = _LIST_KEYS[key]
            updates[attr] = conv(value)
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    config = replace(RunConfig(), phis=phis, **updates)
    config.validate()
    return config


def _apply_flags(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates: Dict[str, object] = {}
    if getattr(args, "beta", None):
        updates["betas"] = _parse_floats(args.beta)
    if getattr(args, "grid", None):
        grids = _parse_grids(args.grid)
        updates["commutator_grids"] = grids
        updates["moment_grids"] = grids
    if getattr(args, "kmax", None) is not None:
        updates["k_max"] = args.kmax
    if getattr(args, "tol", None) is not None:
        # single flag overrides every suite tolerance
        for attr in (
            "tol_commutators",
            "tol_adjoint",
            "tol_moments",
            "tol_spectral",
            "tol_spectral_gamma",
            "tol_gram",
            "tol_marginal",
            "tol_single_atom",
        ):
            updates[attr] = args.tol
    if getattr(args, "out", None):
        updates["out_dir"] = args.out
    if getattr(args, "format", None):
        updates["out_format"] = args.format
    config = replace(config, **updates)
    config.validate()
    return config


# ---------------------------------------------------------------------------
# Report emission


def write_json(reports: Sequence[CheckReport], path: str) -> None:
    payload = [r.to_json_dict() for r in reports]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _format_number(x: object) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(reports: Sequence[CheckReport], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["schema_version", "name", "params", "lhs", "rhs", "abs_err", "rel_err", "tolerance", "pass"]
        )
        for r in reports:
            writer.writerow(
                [
                    crosscheck.SCHEMA_VERSION,
                    r.name,
                    json.dumps(r.params, sort_keys=True),
                    _format_number(r.lhs),
                    _format_number(r.rhs),
                    _format_number(r.abs_err),
                    _format_number(r.rel_err),
                    _format_number(r.tolerance),
                    r.passed,
                ]
            )


def _emit(reports: Sequence[CheckReport], config: RunConfig, stem: str) -> None:
    os.makedirs(config.out_dir, exist_ok=True)
    if config.out_format in ("json", "both"):
        write_json(reports, os.path.join(config.out_dir, f"report_{stem}.json"))
    if config.out_format in ("csv", "both"):
        write_csv(reports, os.path.join(config.out_dir, f"report_{stem}.csv"))


def _summarize(reports: Sequence[CheckReport], label: str) -> int:
    failures = [r for r in reports if not r.passed]
    print(f"{label}: {len(reports) - len(failures)}/{len(reports)} checks passed")
    for r in failures:
        print(f"  FAIL {r.name} params={r.params} rel_err={r.rel_err:.3e} tol={r.tolerance:.3e}")
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Suite runners


def _run_commutators(config: RunConfig) -> List[CheckReport]:
    reports = crosscheck.commutator_suite(
        config.commutator_grids, config.seeds, tol=config.tol_commutators
    )
    reports += crosscheck.adjointness_suite(
        config.commutator_grids, config.seeds, tol=config.tol_adjoint
    )
    return reports


def _run_moments(config: RunConfig) -> List[CheckReport]:
    return crosscheck.moment_suite(
        config.betas, config.moment_grids, k_max=config.k_max, tol=config.tol_moments
    )


def _run_proofchain(config: RunConfig) -> List[CheckReport]:
    reports = crosscheck.proofchain_suite(
        config.betas,
        n_max=config.gram_orders,
        atom_masses=config.atom_masses,
        tol_spectral=config.tol_spectral,
        tol_spectral_gamma=config.tol_spectral_gamma,
        tol_gram=config.tol_gram,
        tol_atom=config.tol_single_atom,
    )
    reports += crosscheck.marginal_suite(
        config.betas, config.marginal_areas, tol=config.tol_marginal
    )
    return reports


def _run_wick_corpus(corpus: Optional[str]) -> List[CheckReport]:
    return crosscheck.wick_suite(corpus)


def _beta_tag(beta: float) -> str:
    return format(beta, "g").replace(".", "p").replace("-", "m")


def _write_table(path: str, header: Sequence[str], rows: Sequence[Sequence[object]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_number(x) for x in row])


def _distribution_tables(config: RunConfig, beta: float, areas: Sequence[float]) -> List[CheckReport]:
    """Write density/pmf tables and report their normalizations."""
    os.makedirs(config.out_dir, exist_ok=True)
    spec = jm.levy_spec(beta)
    tag = _beta_tag(beta)
    reports: List[CheckReport] = []

    if spec.regime == jm.REGIME_PASCAL:
        rows = []
        k = 1
        while k <= 200:
            mass = jm.levy_density(spec, "nu_tilde", k=k)
            rows.append((k, mass))
            if k > 8 and mass < 1e-15:
                break
            k += 1
        _write_table(
            os.path.join(config.out_dir, f"nu_tilde_beta{tag}.csv"), ["k", "mass"], rows
        )
        _write_table(
            os.path.join(config.out_dir, f"nu_beta{tag}.csv"),
            ["k", "mass"],
            [(k, jm.levy_density(spec, "nu", k=k)) for k, _ in rows],
        )
        total = math.fsum(m for _, m in rows)
    else:
        if spec.regime == jm.REGIME_GAMMA:
            lo, hi = 1e-6, 40.0
        else:
            width = jm.integration_window(lambda s: jm.levy_density(spec, "nu_tilde", s))
            lo, hi = -width, width
        n = config.table_points
        step = (hi - lo) / (n - 1)
        # midpoint offsets keep s = 0 off the grid (the jump density diverges there)
        points = [lo + (i + 0.5) * step for i in range(n - 1)]
        nt_rows = [(s, jm.levy_density(spec, "nu_tilde", s)) for s in points]
        _write_table(
            os.path.join(config.out_dir, f"nu_tilde_beta{tag}.csv"), ["s", "density"], nt_rows
        )
        _write_table(
            os.path.join(config.out_dir, f"nu_beta{tag}.csv"),
            ["s", "density"],
            [(s, jm.levy_density(spec, "nu", s)) for s in points],
        )
        total = jm.total_mass(spec)
    reports.append(
        crosscheck.check(
            "distribution table: base measure normalization",
            {"beta": beta, "regime": spec.regime},
            total,
            1.0,
            config.tol_marginal,
        )
    )

    for area in areas:
        stem = f"marginal_beta{tag}_area{_beta_tag(area)}.csv"
        if spec.regime == jm.REGIME_PASCAL:
            atoms = jm.marginal_atoms(beta, area)
            _write_table(
                os.path.join(config.out_dir, stem),
                ["k", "s", "mass"],
                [(k, s, m) for k, (s, m) in enumerate(atoms)],
            )
            total = math.fsum(m for _, m in atoms)
        else:
            probe = lambda s: jm.marginal_density(beta, area, s)
            width = jm.integration_window(probe)
            lo = -width if spec.regime == jm.REGIME_MEIXNER else -area + 1e-9
            n = config.table_points
            step = (width - lo) / (n - 1)
            points = [lo + i * step for i in range(n)]
            _write_table(
                os.path.join(config.out_dir, stem),
                ["s", "density"],
                [(s, probe(s)) for s in points],
            )
            total = jm.marginal_moment(beta, area, 0)
        reports.append(
            crosscheck.check(
                "distribution table: marginal normalization",
                {"beta": beta, "area": area, "regime": spec.regime},
                total,
                1.0,
                config.tol_marginal,
            )
        )
    return reports


def _run_distributions(config: RunConfig, areas: Sequence[float]) -> List[CheckReport]:
    reports: List[CheckReport] = []
    for beta in config.betas:
        reports += _distribution_tables(config, beta, areas)
    return reports


# ---------------------------------------------------------------------------
# Argument parsing and dispatch


def _build_parser() -> argparse.ArgumentParser:
    # the shared flags are accepted both before and after the subcommand;
    # SUPPRESS keeps an unset flag in one position from clobbering the other
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="path to a flat key=value config file")
    common.add_argument("--beta", help="comma-separated beta list override")
    common.add_argument("--grid", help="grid override 'atoms,cell_mass[;atoms,cell_mass...]'")
    common.add_argument("--kmax", type=int, help="maximum moment order")
    common.add_argument("--tol", type=float, help="override every suite tolerance")
    common.add_argument("--out", help="output directory for reports")
    common.add_argument("--format", choices=("json", "csv", "both"), help="report format")

    parser = argparse.ArgumentParser(
        prog="swnlab",
        parents=[common],
        description="Run the commutator, symbolic, moment, and spectral check suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("commutators", parents=[common],
                   help="numeric commutator and adjointness suites")

    wick_parser = sub.add_parser("wick", parents=[common],
                                 help="symbolic identity corpus / single identity")
    wick_parser.add_argument("--corpus", default="builtin", help="'builtin' or a corpus file path")
    wick_parser.add_argument("--c", dest="c_value", default=None,
                             help="pin the constant c to a rational")
    wick_parser.add_argument(
        "exprs",
        nargs="*",
        default=[],
        metavar="verify LHS RHS",
        help="'verify' followed by two quoted expressions",
    )

    sub.add_parser("moments", parents=[common], help="three-way vacuum moment agreement")
    sub.add_parser("proofchain", parents=[common], help="spectral, Gram, and single-atom checks")

    dist = sub.add_parser("distributions", parents=[common], help="density/pmf tables as CSV")
    dist.add_argument("--marginal", type=float, action="append", dest="marginal_areas",
                      default=None, help="window area for the marginal law (repeatable)")

    sub.add_parser("all", parents=[common], help="every suite; exit 0 iff all checks pass")
    return parser


def _wick_command(args: argparse.Namespace, config: RunConfig) -> int:
    c_value = None
    if args.c_value not in (None, "sym"):
        try:
            c_value = Fraction(args.c_value)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"--c expects a rational or 'sym', got {args.c_value!r}")
    if args.exprs:
        if len(args.exprs) != 3 or args.exprs[0] != "verify":
            raise ConfigError("usage: swnlab wick verify '<lhs>' '<rhs>'")
        try:
            result = wick.verify_identity(args.exprs[1], args.exprs[2], c_value=c_value)
        except wick.WickParseError as exc:
            print(f"parse error: {exc}", file=sys.stderr)
            return 2
        print(f"lhs: {result.lhs_canonical}")
        print(f"rhs: {result.rhs_canonical}")
        reading = wick.smeared_reading(wick.parse(args.exprs[1]))
        if reading is not None:
            print(f"smeared reading of lhs: {reading}")
        if result.ok:
            print("identity holds")
            return 0
        print(f"identity FAILS; difference: {result.diff}")
        return 1
    corpus = None if args.corpus == "builtin" else args.corpus
    reports = _run_wick_corpus(corpus)
    _emit(reports, config, "wick")
    return _summarize(reports, "wick")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config_path = getattr(args, "config", None)
        config = load_config(config_path) if config_path else RunConfig()
        config = _apply_flags(config, args)

        if args.command == "wick":
            return _wick_command(args, config)

        if args.command == "commutators":
            reports = _run_commutators(config)
            _emit(reports, config, "commutators")
            return _summarize(reports, "commutators")

        if args.command == "moments":
            reports = _run_moments(config)
            _emit(reports, config, "moments")
            return _summarize(reports, "moments")

        if args.command == "proofchain":
            reports = _run_proofchain(config)
            _emit(reports, config, "proofchain")
            return _summarize(reports, "proofchain")

        if args.command == "distributions":
            areas = tuple(args.marginal_areas) if args.marginal_areas else config.marginal_areas
            reports = _run_distributions(config, areas)
            _emit(reports, config, "distributions")
            return _summarize(reports, "distributions")

        # all
        reports = _run_commutators(config)
        reports += _run_wick_corpus(None)
        reports += _run_moments(config)
        reports += _run_proofchain(config)
        reports += _run_distributions(config, config.marginal_areas)
        _emit(reports, config, "all")
        return _summarize(reports, "all")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
