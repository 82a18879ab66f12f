"""Cross-check harness: three-way moment identities, proof-chain surrogates, reports.

Every check produces a :class:`CheckReport` carrying the compared values,
absolute and relative errors, the tolerance, and the pass flag.  A check
passes iff the relative error is at most the tolerance, where the relative
error falls back to the absolute one when both magnitudes are below 1e-12.
Suites dispatch independent cases to a small worker pool and assemble the
reports in deterministic parameter order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import extfock, jacobimeixner as jm, swnrep, wick
from .basespace import GridFunction, GridSpace

SCHEMA_VERSION = 1

_ABS_FALLBACK = 1e-12


def _run_ordered(tasks: Sequence[Callable[[], List["CheckReport"]]]) -> List["CheckReport"]:
    """Run independent report-producing tasks on a pool, keep input order."""
    if len(tasks) <= 1:
        return [r for t in tasks for r in t()]
    with ThreadPoolExecutor(max_workers=min(8, len(tasks))) as pool:
        futures = [pool.submit(t) for t in tasks]
        return [r for f in futures for r in f.result()]


@dataclass
class CheckReport:
    """One verified identity: values, errors, tolerance, verdict."""

    name: str
    params: Dict[str, object]
    lhs: object
    rhs: object
    tolerance: float
    kind: str = "compare"  # 'compare' | 'residual' | 'symbolic'
    abs_err: float = field(init=False)
    rel_err: float = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        if self.kind == "symbolic":
            ok = self.lhs == self.rhs
            self.abs_err = 0.0 if ok else 1.0
            self.rel_err = self.abs_err
        elif self.kind == "residual":
            # residuals arrive already normalized; they are the relative error
            self.abs_err = abs(float(self.lhs))
            self.rel_err = self.abs_err
        else:
            lhs = float(self.lhs)
            rhs = float(self.rhs)
            self.abs_err = abs(lhs - rhs)
            denom = max(abs(lhs), abs(rhs))
            self.rel_err = self.abs_err if denom < _ABS_FALLBACK else self.abs_err / denom
        self.passed = self.rel_err <= self.tolerance

    def to_json_dict(self) -> Dict[str, object]:
        out: Dict[str, object] = {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "abs_err": self.abs_err,
            "rel_err": self.rel_err,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
        if self.kind == "residual":
            out["residual"] = self.lhs
        return out


def check(name: str, params: Dict[str, object], lhs: float, rhs: float, tol: float) -> CheckReport:
    return CheckReport(name, params, lhs, rhs, tol)


def residual_check(name: str, params: Dict[str, object], residual: float, tol: float) -> CheckReport:
    return CheckReport(name, params, residual, 0.0, tol, kind="residual")


def symbolic_check(name: str, params: Dict[str, object], lhs: str, rhs: str) -> CheckReport:
    return CheckReport(name, params, lhs, rhs, 0.0, kind="symbolic")


# ---------------------------------------------------------------------------
# Three-way moment identity


def _swn_moments(beta: float, phi: GridFunction, k_max: int) -> List[float]:
    space = swnrep.SwnSpace(phi.space, ladder_levels=k_max + 1, max_level=k_max + 1)
    op = swnrep.field_op(space, phi, beta)
    vec = space.vacuum()
    out = [vec.entries.get((), 0.0)]
    for _ in range(k_max):
        vec = op.apply(vec)
        out.append(vec.entries.get((), 0.0))
    return out


def _ext_moments(beta: float, phi: GridFunction, k_max: int) -> List[float]:
    vec = extfock.ext_vacuum(phi.space, max_level=k_max)
    out = [vec.component(0).value(())]
    for _ in range(k_max):
        vec = extfock.apply_a("beta", phi, vec, beta=beta)
        out.append(vec.component(0).value(()))
    return out


def _cumulant_moments(beta: float, phi: GridFunction, k_max: int) -> List[float]:
    kappas = [jm.cumulant(beta, phi, j) for j in range(1, k_max + 1)]
    return [jm.moments_from_cumulants(kappas, k) for k in range(k_max + 1)]


def theorem1_moment_check(
    beta: float,
    phi: GridFunction,
    k_max: int,
    tol: float = 1e-8,
    phi_label: str = "phi",
) -> List[CheckReport]:
    """Compare the three vacuum-moment routes for k = 0..k_max.

    Route (i): the field operator on the truncated Fock space over grid x
    ladder.  Route (ii): 2^k times the ladder-field moment on the extended
    space.  Route (iii): 2^k times the moment composed from the
    compensated-noise cumulants.
    """
    swn = _swn_moments(beta, phi, k_max)
    ext = _ext_moments(beta, phi, k_max)
    cum = _cumulant_moments(beta, phi, k_max)
    out: List[CheckReport] = []
    for k in range(k_max + 1):
        params = {
            "beta": beta,
            "phi": phi_label,
            "k": k,
            "grid_atoms": phi.space.size,
            "cell_mass": phi.space.cell_mass,
            "truncation": k_max + 1,
        }
        scale = 2.0**k
        out.append(
            check(f"moment k={k}: field vs ladder-field", params, swn[k], scale * ext[k], tol)
        )
        out.append(
            check(f"moment k={k}: field vs cumulants", params, swn[k], scale * cum[k], tol)
        )
    return out


def moment_suite(
    betas: Sequence[float],
    grids: Sequence[Tuple[int, float]],
    k_max: int = 8,
    tol: float = 1e-8,
    seed: int = 2024,
) -> List[CheckReport]:
    """Three-way moment agreement over a beta list and grid list."""
    tasks = []
    for beta in betas:
        for atoms, mass in grids:
            def task(beta=beta, atoms=atoms, mass=mass) -> List[CheckReport]:
                space = GridSpace.regular(atoms, mass)
                phi = swnrep.random_grid_function(space, seed)
                label = f"seeded({seed})"
                return theorem1_moment_check(beta, phi, k_max, tol=tol, phi_label=label)

            tasks.append(task)
    return _run_ordered(tasks)


# ---------------------------------------------------------------------------
# Proof-chain surrogates: spectral moments, Gram matrix, single-atom reduction


def proofchain_check(
    beta: float,
    n_max: int = 6,
    j_max: int = 8,
    atom_masses: Sequence[float] = (0.5, 1.0, 2.0),
    atom_orders: int = 6,
    tol_spectral: float = 1e-6,
    tol_spectral_gamma: float = 1e-10,
    tol_gram: float = 1e-6,
    tol_atom: float = 1e-8,
) -> List[CheckReport]:
    """Desk-scale checks of the spectral-measure identification chain.

    (a) first-entry powers of the ladder matrix against regime-native
    moments of the base measure; (b) the Gram matrix of the embedded
    polynomials under the jump measure against its diagonal closed form;
    (c) the one-atom ladder-field matrix against the window-marginal
    moments.
    """
    spec = jm.levy_spec(beta)
    out: List[CheckReport] = []

    tol_a = tol_spectral_gamma if spec.regime == jm.REGIME_GAMMA else tol_spectral
    for j in range(j_max + 1):
        out.append(
            check(
                f"spectral moment j={j} vs {spec.regime} oracle",
                {"beta": beta, "j": j, "regime": spec.regime},
                jm.spectral_moment(beta, j),
                jm.measure_moment(spec, j),
                tol_a,
            )
        )
    out.append(
        check(
            "base measure total mass",
            {"beta": beta, "regime": spec.regime},
            jm.total_mass(spec),
            1.0,
            tol_spectral,
        )
    )

    gram = jm.polynomial_gram(beta, n_max)
    for m in range(1, n_max + 1):
        for n in range(m, n_max + 1):
            expected = float(math.factorial(n - 1) * math.factorial(n)) if m == n else 0.0
            name = f"gram entry ({m},{n})"
            params = {"beta": beta, "m": m, "n": n}
            if m == n:
                out.append(check(name, params, gram[m - 1][n - 1], expected, tol_gram))
            else:
                # off-diagonal target is zero; scale against the diagonal norms
                scale = math.sqrt(gram[m - 1][m - 1] * gram[n - 1][n - 1])
                out.append(
                    residual_check(name, params, abs(gram[m - 1][n - 1]) / scale, tol_gram)
                )

    for mass in atom_masses:
        matrix = extfock.single_atom_jacobi(beta, mass, size=atom_orders + 2)
        moments = jm.vacuum_moments(matrix, atom_orders)
        for j in range(atom_orders + 1):
            out.append(
                check(
                    f"one-atom field moment j={j} vs marginal",
                    {"beta": beta, "cell_mass": mass, "j": j},
                    moments[j],
                    jm.marginal_moment(beta, mass, j),
                    tol_atom,
                )
            )
    return out


def proofchain_suite(betas: Sequence[float], **kwargs) -> List[CheckReport]:
    tasks = [lambda beta=beta: proofchain_check(beta, **kwargs) for beta in betas]
    return _run_ordered(tasks)


def marginal_checks(
    beta: float,
    areas: Sequence[float] = (0.5, 1.0, 2.0),
    tol: float = 1e-6,
) -> List[CheckReport]:
    """Normalization, mean zero, and variance = area for the window marginals."""
    out: List[CheckReport] = []
    for area in areas:
        params = {"beta": beta, "area": area, "regime": jm.levy_spec(beta).regime}
        out.append(
            check("marginal normalization", params, jm.marginal_moment(beta, area, 0), 1.0, tol)
        )
        mean = jm.marginal_moment(beta, area, 1)
        out.append(residual_check("marginal mean", params, abs(mean) / math.sqrt(area), tol))
        out.append(
            check("marginal variance", params, jm.marginal_moment(beta, area, 2), area, tol)
        )
    return out


def marginal_suite(betas, areas=(0.5, 1.0, 2.0), tol: float = 1e-6) -> List[CheckReport]:
    tasks = [lambda beta=beta: marginal_checks(beta, areas, tol) for beta in betas]
    return _run_ordered(tasks)


# ---------------------------------------------------------------------------
# Commutator and adjointness suites (numeric representations)


def swn_commutator_checks(
    grid: Tuple[int, float],
    seeds: Sequence[int],
    tol: float = 1e-10,
    ladder_levels: int = 4,
    max_level: int = 4,
) -> List[CheckReport]:
    atoms, mass = grid
    space = swnrep.SwnSpace(GridSpace.regular(atoms, mass), ladder_levels, max_level)
    worst: Dict[str, float] = {}
    for seed in seeds:
        phi = swnrep.random_grid_function(space.grid, seed)
        psi = swnrep.random_grid_function(space.grid, seed + 10_000)
        vectors = [swnrep.random_test_vector(space, seed + 20_000 + i) for i in range(3)]
        for name, pair, rhs in swnrep.commutation_table(space, phi, psi):
            res = swnrep.commutator_residual(pair, rhs, vectors)
            worst[name] = max(worst.get(name, 0.0), res)
    params = {
        "grid_atoms": atoms,
        "cell_mass": mass,
        "seeds": list(seeds),
        "ladder_levels": ladder_levels,
        "max_level": max_level,
    }
    return [
        residual_check(f"fock rep: {name}", params, res, tol)
        for name, res in worst.items()
    ]


def ext_commutator_checks(
    grid: Tuple[int, float],
    seeds: Sequence[int],
    tol: float = 1e-10,
    max_level: int = 4,
) -> List[CheckReport]:
    atoms, mass = grid
    space = GridSpace.regular(atoms, mass)
    worst: Dict[str, float] = {}
    for seed in seeds:
        phi = swnrep.random_grid_function(space, seed)
        psi = swnrep.random_grid_function(space, seed + 10_000)
        vectors = [
            extfock_random_vector(space, max_level - 2, seed + 20_000 + i) for i in range(3)
        ]
        for name, commutator_fn, rhs_fn in ext_commutation_table(phi, psi):
            res = 0.0
            for vec in vectors:
                denom = extfock.ext_norm(vec)
                if denom == 0.0:
                    continue
                diff = commutator_fn(vec) - rhs_fn(vec)
                res = max(res, extfock.ext_norm(diff) / denom)
            worst[name] = max(worst.get(name, 0.0), res)
    params = {
        "grid_atoms": atoms,
        "cell_mass": mass,
        "seeds": list(seeds),
        "max_level": max_level,
    }
    return [
        residual_check(f"extended rep: {name}", params, res, tol)
        for name, res in worst.items()
    ]


def extfock_random_vector(space: GridSpace, max_support: int, seed: int) -> extfock.ExtFockVector:
    """Random extended vector supported at levels <= max_support (window-safe)."""
    import random as _random
    from itertools import combinations_with_replacement

    rng = _random.Random(seed)
    levels = {}
    for n in range(max_support + 1):
        vals = {}
        for key in combinations_with_replacement(range(space.size), n):
            vals[key] = rng.uniform(-1.0, 1.0)
        levels[n] = extfock.SymmetricKernel(space, n, vals)
    return extfock.ExtFockVector(space, max_support + 2, levels)


def ext_commutation_table(phi: GridFunction, psi: GridFunction):
    """The six relations for the doubled ladder-field operators.

    Entries are (name, commutator applier, right-hand-side applier) acting
    on extended vectors.
    """
    from .basespace import inner as grid_inner, pointwise_product

    prod = pointwise_product(phi, psi)
    pairing = grid_inner(phi, psi)

    def op(kind: str, f: GridFunction) -> Callable:
        return lambda vec: 2.0 * extfock.apply_a(kind, f, vec)

    def comm(p: Callable, q: Callable) -> Callable:
        return lambda vec: p(q(vec)) - q(p(vec))

    def combo(*terms: Tuple[float, Optional[Callable]]) -> Callable:
        def apply(vec):
            out = extfock.ExtFockVector(vec.space, vec.max_level, {})
            for scalar, operator in terms:
                term = scalar * vec if operator is None else scalar * operator(vec)
                out = out + term
            return out

        return apply

    lower_phi, lower_psi = op("minus", phi), op("minus", psi)
    raise_phi, raise_psi = op("plus", phi), op("plus", psi)
    num_phi, num_psi = op("zero", phi), op("zero", psi)
    return [
        (
            "[B(phi),Bdag(psi)] = 4<phi,psi> + 4N(phi*psi)",
            comm(lower_phi, raise_psi),
            combo((4.0 * pairing, None), (4.0, op("zero", prod))),
        ),
        (
            "[N(phi),Bdag(psi)] = 2Bdag(phi*psi)",
            comm(num_phi, raise_psi),
            combo((2.0, op("plus", prod))),
        ),
        (
            "[N(phi),B(psi)] = -2B(phi*psi)",
            comm(num_phi, lower_psi),
            combo((-2.0, op("minus", prod))),
        ),
        ("[N(phi),N(psi)] = 0", comm(num_phi, num_psi), combo()),
        ("[B(phi),B(psi)] = 0", comm(lower_phi, lower_psi), combo()),
        ("[Bdag(phi),Bdag(psi)] = 0", comm(raise_phi, raise_psi), combo()),
    ]


def commutator_suite(
    grids: Sequence[Tuple[int, float]],
    seeds: Sequence[int],
    tol: float = 1e-10,
) -> List[CheckReport]:
    tasks: List[Callable[[], List[CheckReport]]] = []
    for grid in grids:
        tasks.append(lambda grid=grid: swn_commutator_checks(grid, seeds, tol))
    for grid in grids:
        tasks.append(lambda grid=grid: ext_commutator_checks(grid, seeds, tol))
    return _run_ordered(tasks)


def adjointness_suite(
    grids: Sequence[Tuple[int, float]],
    seeds: Sequence[int],
    tol: float = 1e-10,
) -> List[CheckReport]:
    """Adjointness of raising/lowering and symmetry of the neutral operators."""
    out: List[CheckReport] = []
    for atoms, mass in grids:
        space = swnrep.SwnSpace(GridSpace.regular(atoms, mass), 4, 4)
        worst_adj = worst_sym = 0.0
        for seed in seeds:
            phi = swnrep.random_grid_function(space.grid, seed)
            f = swnrep.random_test_vector(space, seed + 1)
            g = swnrep.random_test_vector(space, seed + 2)
            bf = swnrep.raise_op(space, phi).apply(f)
            bg = swnrep.lower_op(space, phi).apply(g)
            lhs = swnrep.fock_inner(bf, g)
            rhs = swnrep.fock_inner(f, bg)
            scale = max(abs(lhs), abs(rhs), 1e-12)
            worst_adj = max(worst_adj, abs(lhs - rhs) / scale)
            nf = swnrep.number_op(space, phi).apply(f)
            ng = swnrep.number_op(space, phi).apply(g)
            lhs = swnrep.fock_inner(nf, g)
            rhs = swnrep.fock_inner(f, ng)
            scale = max(abs(lhs), abs(rhs), 1e-12)
            worst_sym = max(worst_sym, abs(lhs - rhs) / scale)
        params = {"grid_atoms": atoms, "cell_mass": mass, "seeds": list(seeds)}
        out.append(residual_check("fock rep: raise/lower adjoint", params, worst_adj, tol))
        out.append(residual_check("fock rep: neutral symmetric", params, worst_sym, tol))

        grid_space = GridSpace.regular(atoms, mass)
        worst_adj = worst_sym = 0.0
        for seed in seeds:
            phi = swnrep.random_grid_function(grid_space, seed)
            f = extfock_random_vector(grid_space, 2, seed + 3)
            g = extfock_random_vector(grid_space, 2, seed + 4)
            lhs = extfock.ext_fock_inner(extfock.apply_a("plus", phi, f), g)
            rhs = extfock.ext_fock_inner(f, extfock.apply_a("minus", phi, g))
            scale = max(abs(lhs), abs(rhs), 1e-12)
            worst_adj = max(worst_adj, abs(lhs - rhs) / scale)
            lhs = extfock.ext_fock_inner(extfock.apply_a("zero", phi, f), g)
            rhs = extfock.ext_fock_inner(f, extfock.apply_a("zero", phi, g))
            scale = max(abs(lhs), abs(rhs), 1e-12)
            worst_sym = max(worst_sym, abs(lhs - rhs) / scale)
        params = {"grid_atoms": atoms, "cell_mass": mass, "seeds": list(seeds)}
        out.append(residual_check("extended rep: raise/lower adjoint", params, worst_adj, tol))
        out.append(residual_check("extended rep: neutral symmetric", params, worst_sym, tol))
    return out


# ---------------------------------------------------------------------------
# Symbolic suite


_SMEARED_EXPECTED = {
    1: "2*c*<phi,psi> + 4*N(phi*psi)",
    2: "2*Bd(phi*psi)",
    3: "-2*B(phi*psi)",
    4: "0",
    5: "0",
    6: "0",
}


def wick_suite(corpus_path: Optional[str] = None) -> List[CheckReport]:
    """Verify the identity corpus and the smeared readings of the smeared table."""
    out: List[CheckReport] = []
    for ident in wick.load_corpus(corpus_path):
        result = wick.verify_identity(ident.lhs, ident.rhs)
        out.append(
            symbolic_check(
                f"wick: {ident.label}",
                {"lhs": ident.lhs, "rhs": ident.rhs},
                result.lhs_canonical,
                result.rhs_canonical,
            )
        )
    # smeared readings of the squared-letter commutator table
    for idx, (lhs, _rhs) in enumerate(_squared_letter_table(), start=1):
        reading = wick.smeared_reading(wick.parse(lhs))
        out.append(
            symbolic_check(
                f"wick smeared reading {idx}",
                {"pointwise": lhs},
                reading if reading is not None else "<no smeared pattern>",
                _SMEARED_EXPECTED[idx],
            )
        )
    return out


def _squared_letter_table() -> List[Tuple[str, str]]:
    return [
        ("[B(x), Bd(y)]", "2 c delta(x,y) + 4 delta(x,y) N(y)"),
        ("[N(x), Bd(y)]", "2 delta(x,y) Bd(y)"),
        ("[N(x), B(y)]", "-2 delta(x,y) B(y)"),
        ("[N(x), N(y)]", "0"),
        ("[B(x), B(y)]", "0"),
        ("[Bd(x), Bd(y)]", "0"),
    ]
