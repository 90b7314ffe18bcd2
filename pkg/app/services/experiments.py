# path: app/services/experiments.py
"""
Subcomandos de la CLI: arman las entradas, recorren la grilla de parámetros
y devuelven una ResultTable ordenada por índice de grilla.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from app.core.config import (
    ATOM_MASS_TOL,
    DENSITY_RTOL,
    GENERICITY_TOL,
    ORTHOGONALITY_TOL,
    PARALLEL_TOL,
    POLE_MASK_RADIUS,
    REAL_SPECTRUM_TOL,
    SIMPLICITY_TOL,
)
from app.core.errors import (
    ComplexSpectrum,
    DegenerateSpectrum,
    HypothesisViolated,
    InvalidInput,
    InvalidParams,
    NotSelfAdjoint,
    SingularB,
)
from app.models.measures import TransformParams
from app.models.run_config import ResultTable, RunConfig
from app.models.singvals import VanishesLinearly
from app.services import measures
from app.services.meixner import meixner_density, meixner_params
from app.services.numcore import eigenvalues_dense
from app.services.rank2 import Rank2Perturbation, interlacing_condition, interlacing_curves, verify_interlacing
from app.services.singvals import SVPerturbation, smallest_sv_asymptotics, sv_convergence_table
from app.utils.grid import GridPoint, axis_values, map_grid, parse_axis, parse_grid
from app.utils.matrix_io import Loaded, load_input, require

logger = logging.getLogger(__name__)


# ------------------------------------------------------------------------------------
# ENTRADAS
# ------------------------------------------------------------------------------------

def _unit(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x)


def example_input(name: str, seed: int, size: int = 10) -> Loaded:
    """
    Entradas incorporadas:
        diag4      A = diag(1,2,3,4), u = ½(1,1,1,1)
        random     B (size×size) gaussiana, u y v unitarios al azar
        vanishing  como random pero con u ⟂ B⁻¹v (u*B⁻¹v = 0)
    """
    if name == "diag4":
        return {"A": np.diag([1.0, 2.0, 3.0, 4.0]), "u": np.full(4, 0.5)}

    rng = np.random.default_rng(seed)
    if name in ("random", "vanishing"):
        B = rng.standard_normal((size, size))
        v = _unit(rng.standard_normal(size))
        u = _unit(rng.standard_normal(size))
        if name == "vanishing":
            d = np.linalg.solve(B, v)
            u = _unit(u - (d @ u) / (d @ d) * d)
        return {"B": B, "u": u, "v": v}

    raise InvalidInput(f"Ejemplo desconocido: '{name}'", {"available": ["diag4", "random", "vanishing"]})


def _resolve_input(config: RunConfig, default_name: str) -> Loaded:
    if config.example:
        return example_input(config.example, config.seed, int(config.options.get("size", 10)))
    if config.input is None:
        raise InvalidInput("Se requiere --input o --example")
    return load_input(config.input, default_name)


def _clean_spectrum(values: np.ndarray) -> np.ndarray:
    """Orden (Re, Im) con partes imaginarias despreciables llevadas a 0."""
    values = np.asarray(values, dtype=np.complex128)
    tiny = np.abs(values.imag) < REAL_SPECTRUM_TOL * (1.0 + np.abs(values))
    values = np.where(tiny, values.real + 0j, values)
    return values[np.lexsort((values.imag, values.real))]


# ------------------------------------------------------------------------------------
# SPECTRUM
# ------------------------------------------------------------------------------------

def _perturbation(data: Loaded, shape: str) -> Rank2Perturbation:
    A, u = require(data, "A"), require(data, "u")
    if shape == "antidiagonal":
        return Rank2Perturbation.antidiagonal(A, u)
    if shape == "diagonal":
        return Rank2Perturbation.diagonal(A, u)
    if shape == "general":
        return Rank2Perturbation.general(A, u, require(data, "w"), require(data, "g"), require(data, "h"))
    raise InvalidInput(f"Forma desconocida: '{shape}'")


def cmd_spectrum(config: RunConfig) -> ResultTable:
    """Autovalores de A − s·uw* − t·gh* por punto (s, t), con x₀ y el veredicto de entrelazado."""
    data = _resolve_input(config, "A")
    shape = config.options.get("shape", "antidiagonal")
    base = _perturbation(data, shape)
    points = parse_grid(config.grid, {"s": "0", "t": "0"})
    n = base.n
    spectrum_A = eigenvalues_dense(base.A)
    genericity_tol = config.tol("genericity", GENERICITY_TOL)
    simplicity_tol = config.tol("simplicity", SIMPLICITY_TOL)

    def row_for(point: GridPoint) -> Dict[str, Any]:
        s, t = point["s"], point["t"]
        P = base.with_params(s, t)
        eigs = _clean_spectrum(eigenvalues_dense(P.matrix()))
        row: Dict[str, Any] = dict(point)
        for k, lam in enumerate(eigs, start=1):
            row[f"lambda_{k}_re"] = float(lam.real)
            row[f"lambda_{k}_im"] = float(lam.imag)

        if shape == "antidiagonal":
            try:
                report = interlacing_condition(
                    base.A, base.u, s, t, simplicity_tol=simplicity_tol, genericity_tol=genericity_tol
                )
                row["x0"] = report.x0
                row["applies"] = report.applies
            except (HypothesisViolated, NotSelfAdjoint) as exc:
                logger.warning(f"[CLI] Sin condición de entrelazado en s={s:g}, t={t:g}: {exc.message}")
            try:
                row["interlaces"] = verify_interlacing(spectrum_A, eigs)
            except (ComplexSpectrum, DegenerateSpectrum):
                row["interlaces"] = False if np.any(eigs.imag != 0) else None
        return row

    rows = map_grid(row_for, points, config.workers)
    columns = list(points[0]) + [f"lambda_{k}_{part}" for k in range(1, n + 1) for part in ("re", "im")]
    if shape == "antidiagonal":
        columns += ["x0", "applies", "interlaces"]
    return ResultTable(columns=columns, rows=rows)


# ------------------------------------------------------------------------------------
# SVSWEEP
# ------------------------------------------------------------------------------------

def cmd_svsweep(config: RunConfig) -> ResultTable:
    """σⱼ(B − τvu*) sobre la grilla de τ, distancias a los límites y pendientes log-log."""
    data = _resolve_input(config, "B")
    B = require(data, "B")
    n = B.shape[1] if B.ndim == 2 else 0
    if "u" not in data or "v" not in data:
        rng = np.random.default_rng(config.seed)
        data = {**data, "u": _unit(rng.standard_normal(n)), "v": _unit(rng.standard_normal(B.shape[0]))}
        logger.info(f"[CLI] u y v generados con semilla {config.seed}")

    P = SVPerturbation.build(B, require(data, "u"), require(data, "v"), parallel_tol=config.tol("parallel", PARALLEL_TOL))
    points = parse_grid(config.grid, {"tau": "1e1:1e5:9:log"})
    taus = sorted(axis_values(points, "tau"))
    if any(tau < 0 for tau in taus):
        raise InvalidInput("τ debe ser no negativo")

    if taus == [0.0]:
        sv = np.linalg.svd(P.B, compute_uv=False)
        row = {"tau": 0.0, **{f"sigma_{j}": float(x) for j, x in enumerate(sv, start=1)}}
        return ResultTable(columns=list(row), rows=[row])

    table = sv_convergence_table(P, taus)
    count = len(table.singular_values[0])
    width = len(table.slopes)

    rows: List[Dict[str, Any]] = []
    for i, tau in enumerate(table.taus):
        row: Dict[str, Any] = {"tau": tau}
        row.update({f"sigma_{j}": table.singular_values[i][j - 1] for j in range(1, count + 1)})
        row.update({f"dist_{j + 2}": table.distances[i][j] for j in range(width)})
        if table.scaled_smallest is not None:
            row["sigma_n_tau"] = table.scaled_smallest[i]
        rows.append(row)

    columns = ["tau"] + [f"sigma_{j}" for j in range(1, count + 1)] + [f"dist_{j + 2}" for j in range(width)]
    summary: Dict[str, Any] = {
        "slopes": {f"dist_{j + 2}": slope for j, slope in enumerate(table.slopes)},
        "limits": table.limits,
        "compression_gap": table.compression_gap,
    }
    if table.scaled_smallest is not None:
        columns.append("sigma_n_tau")
        try:
            branch = smallest_sv_asymptotics(P.B, P.u, P.v, orth_tol=config.tol("orthogonality", ORTHOGONALITY_TOL))
            if isinstance(branch, VanishesLinearly):
                summary["vanishing_rate"] = branch.rate
        except SingularB:
            pass
    return ResultTable(columns=columns, rows=rows, summary=summary)


# ------------------------------------------------------------------------------------
# DENSITY
# ------------------------------------------------------------------------------------

def base_measure(label: str, data: Optional[Loaded] = None) -> measures.SpectralMeasure:
    """
    wigner | bernoulli | delta:a | meixner:γ,a,b,c | jacobi (a y b desde --input).
    """
    name, _, args = label.partition(":")
    name = name.strip().lower()
    try:
        values = [float(x) for x in args.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidInput(f"Parámetros no numéricos en la medida '{label}'") from exc

    if name == "wigner":
        return measures.wigner()
    if name == "bernoulli":
        return measures.bernoulli()
    if name == "delta" and len(values) == 1:
        return measures.delta(values[0])
    if name == "meixner" and len(values) == 4:
        return measures.meixner(*values)
    if name == "jacobi":
        if data is None:
            raise InvalidInput("La medida jacobi requiere --input con las entradas 'a' y 'b'")
        return measures.from_jacobi(require(data, "a").real, require(data, "b").real)
    raise InvalidInput(f"Medida desconocida o mal parametrizada: '{label}'")


def _transform_params(kind: str, point: GridPoint) -> Optional[TransformParams]:
    try:
        if kind == "none":
            return None
        if kind == "t":
            return TransformParams(kind="T", tau=point["tau"])
        if kind == "w":
            return TransformParams(kind="W", s=point["s"], t=point["t"])
        if kind == "u":
            if "p" in point and "q" in point:
                return TransformParams(kind="U", p=point["p"], q=point["q"])
            return TransformParams.from_deformation(point["s"], point["t"])
    except KeyError as exc:
        raise InvalidInput(f"Falta el parámetro {exc} para la transformación '{kind}'") from exc
    except ValidationError as exc:
        raise InvalidParams(f"Parámetros inválidos para la transformación '{kind}'", {"errors": exc.errors(include_url=False)}) from exc
    raise InvalidInput(f"Transformación desconocida: '{kind}'")


def _transformed(G: measures.CauchyTransform, kind: str, point: GridPoint) -> measures.CauchyTransform:
    params = _transform_params(kind, point)
    return G if params is None else measures.apply_transform(G, params)


def _closed_form(measure: str, kind: str, point: GridPoint, xs: np.ndarray) -> Optional[np.ndarray]:
    """Densidad de referencia cuando se conoce en forma cerrada."""
    if measure == "wigner":
        if kind == "none":
            return measures.semicircle_density(xs)
        if kind == "t":
            return measures.wigner_u_density(xs, 0.0, 1.0 - point["tau"])
        if kind == "u" and "q" in point:
            return measures.wigner_u_density(xs, 0.0, 1.0 - point["q"])
        if kind == "u":
            return measures.wigner_u_density(xs, point["s"], point["t"])
        if kind == "w":
            return measures.wigner_w_density(xs, point["s"], point["t"])
    if measure.startswith("meixner:") and kind == "none":
        values = [float(x) for x in measure.split(":", 1)[1].split(",")]
        return meixner_density(meixner_params(*values), xs)
    return None


def cmd_density(config: RunConfig) -> ResultTable:
    """Inversión de Stieltjes de la medida transformada sobre la grilla de x, más átomos."""
    label = str(config.options.get("measure", "wigner"))
    kind = str(config.options.get("transform", "none")).lower()
    data = load_input(config.input, "a") if config.input is not None else None
    mu = base_measure(label, data)
    G = measures.measure_cauchy(mu)
    xs = np.asarray(parse_axis("x", str(config.options.get("x_range", "-4:4:801"))))
    points = parse_grid(config.grid)
    param_names = list(points[0])
    mask_radius = config.tol("mask", POLE_MASK_RADIUS)

    def rows_for(point: GridPoint) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        H = _transformed(G, kind, point)
        result = measures.stieltjes_invert(
            H,
            xs,
            mass_tol=config.tol("atom_mass", ATOM_MASS_TOL),
            mask_radius=mask_radius,
            rtol=config.tol("density", DENSITY_RTOL),
        )
        reference = _closed_form(label.lower(), kind, point, xs)
        rows: List[Dict[str, Any]] = []
        for i, x in enumerate(xs):
            row: Dict[str, Any] = {**point, "kind": "density", "x": float(x), "density": float(result.density[i])}
            if reference is not None:
                row["reference"] = float(reference[i])
            row["flagged"] = bool(result.flagged[i])
            row["masked"] = bool(result.masked[i])
            rows.append(row)
        for atom in result.atoms:
            rows.append({**point, "kind": "atom", "x": atom.location, "mass": atom.mass})
        info = {**point, "name": H.name, "atoms": len(result.atoms), "total_mass": result.total_mass}
        return rows, info

    results = map_grid(rows_for, points, config.workers)
    rows = [row for chunk, _ in results for row in chunk]
    columns = param_names + ["kind", "x", "density"]
    if any("reference" in row for row in rows):
        columns.append("reference")
    columns += ["flagged", "masked", "mass"]
    return ResultTable(columns=columns, rows=rows, summary={"points": [info for _, info in results]})


# ------------------------------------------------------------------------------------
# INTERLACE
# ------------------------------------------------------------------------------------

def cmd_interlace(config: RunConfig) -> ResultTable:
    """
    Curvas Σ cⱼ/(x−λⱼ) y −(1−s)(1−t)/((s+t−st)x + stm) con marcadores de
    autovalores. Las filas a menos de un paso de grilla de un polo se omiten.
    """
    data = _resolve_input(config, "A")
    A, u = require(data, "A"), require(data, "u")
    base = Rank2Perturbation.antidiagonal(A, u)
    points = parse_grid(config.grid, {"s": "1.1", "t": "1.2"})
    spectrum_A = _clean_spectrum(eigenvalues_dense(base.A))

    def rows_for(point: GridPoint) -> List[Dict[str, Any]]:
        s, t = point["s"], point["t"]
        eigs = _clean_spectrum(eigenvalues_dense(base.with_params(s, t).matrix()))
        real_eigs = eigs.real[eigs.imag == 0]

        if "x_range" in config.options:
            xs = np.asarray(parse_axis("x", str(config.options["x_range"])))
        else:
            every = np.concatenate([spectrum_A.real, real_eigs])
            xs = np.linspace(every.min() - 1.0, every.max() + 1.0, 2001)
        step = float(np.min(np.diff(xs))) if xs.size > 1 else 0.0
        curves = interlacing_curves(
            base.A, base.u, s, t, xs, mask_radius=max(config.tol("mask", POLE_MASK_RADIUS), step)
        )

        rows: List[Dict[str, Any]] = []
        for x, lhs, rhs in zip(curves["x"], curves["lhs"], curves["rhs"]):
            if np.isfinite(lhs) and np.isfinite(rhs):
                rows.append({**point, "kind": "curve", "x": float(x), "lhs": float(lhs), "rhs": float(rhs), "difference": float(lhs - rhs)})
        rows += [{**point, "kind": "eigenvalue", "x": float(lam)} for lam in np.sort(real_eigs)]
        rows += [{**point, "kind": "pole", "x": float(lam)} for lam in curves["poles"]]
        if np.isfinite(curves["x0"]):
            rows.append({**point, "kind": "x0", "x": float(curves["x0"])})
        return rows

    rows = [row for chunk in map_grid(rows_for, points, config.workers) for row in chunk]
    columns = list(points[0]) + ["kind", "x", "lhs", "rhs", "difference"]
    return ResultTable(columns=columns, rows=rows)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "svsweep": cmd_svsweep,
    "density": cmd_density,
    "interlace": cmd_interlace,
}
