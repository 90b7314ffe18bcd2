# app/main.py
"""
CLI de experimentos numéricos:

    python -m app.main spectrum  --example diag4 --grid "s=1.1,t=1.2"
    python -m app.main svsweep   --example random --grid "tau=1e1:1e5:9:log" --format json
    python -m app.main density   --measure wigner --transform t --grid "tau=1;2;4"
    python -m app.main interlace --example diag4 --grid "s=-2,t=-3" --out curves.csv

Códigos de salida: 0 éxito, 2 entrada inválida, 3 falla numérica.
"""

import argparse
import logging
import sys
import time
from typing import List, Optional

from pydantic import ValidationError

from app.core.config import DEFAULT_SEED, GRID_WORKERS, LOG_LEVEL
from app.core.errors import InvalidInput, SpectralError
from app.models.run_config import RunConfig
from app.services.experiments import COMMANDS
from app.services.export import write_table
from app.utils.log_filters import setup_logging_filters

logger = logging.getLogger(__name__)

# flag --tol-<nombre> -> clave en RunConfig.tolerances
TOLERANCE_FLAGS = {
    "genericity": "|c_j| mínimo para considerar u genérico",
    "simplicity": "separación mínima relativa entre autovalores",
    "parallel": "seno mínimo del ángulo entre B*v y u",
    "orthogonality": "umbral de u*B⁻¹v = 0",
    "atom_mass": "masa mínima para aceptar un átomo",
    "mask": "radio de enmascarado alrededor de polos",
    "density": "tolerancia relativa de la extrapolación de densidad",
}

# opciones propias de cada subcomando que van a RunConfig.options
OPTION_KEYS = ("shape", "size", "measure", "transform", "x_range")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", default=None, help="Archivo .json o .csv con las entradas")
    p.add_argument("--example", default=None, help="Entrada incorporada (diag4, random, vanishing)")
    p.add_argument("--grid", default=None, help='Grilla de parámetros, p. ej. "s=-3:3:61,t=1.2"')
    p.add_argument("--out", default=None, help="Archivo de salida (stdout si falta)")
    p.add_argument("--format", choices=["csv", "json", "xlsx"], default="csv")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=GRID_WORKERS)
    for name, help_text in TOLERANCE_FLAGS.items():
        p.add_argument(f"--tol-{name.replace('_', '-')}", dest=f"tol_{name}", type=float, default=None, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rank2-spectra",
        description="Espectros de perturbaciones de rango dos, valores singulares y transformaciones de medidas.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="Autovalores de A − s·uw* − t·gh* sobre una grilla (s, t)")
    _add_common(p)
    p.add_argument("--shape", choices=["antidiagonal", "diagonal", "general"], default="antidiagonal")

    p = sub.add_parser("svsweep", help="Valores singulares de B − τvu* sobre una grilla de τ")
    _add_common(p)
    p.add_argument("--size", type=int, default=None, help="Dimensión de los ejemplos aleatorios")

    p = sub.add_parser("density", help="Densidad y átomos de una medida transformada")
    _add_common(p)
    p.add_argument("--measure", default="wigner", help="wigner | bernoulli | delta:a | meixner:γ,a,b,c | jacobi")
    p.add_argument("--transform", choices=["none", "u", "t", "w"], default="none")
    p.add_argument("--x-range", dest="x_range", default=None, help="inicio:fin:n")

    p = sub.add_parser("interlace", help="Curvas de la ecuación de entrelazado")
    _add_common(p)
    p.add_argument("--x-range", dest="x_range", default=None, help="inicio:fin:n")

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """
    Raises:
        InvalidInput: la combinación de flags no valida.
    """
    tolerances = {
        name: getattr(args, f"tol_{name}") for name in TOLERANCE_FLAGS if getattr(args, f"tol_{name}") is not None
    }
    options = {key: getattr(args, key) for key in OPTION_KEYS if getattr(args, key, None) is not None}
    try:
        return RunConfig(
            subcommand=args.command,
            input=args.input,
            example=args.example,
            grid=args.grid,
            out=args.out,
            format=args.format,
            seed=args.seed,
            workers=args.workers,
            tolerances=tolerances,
            options=options,
        )
    except ValidationError as exc:
        raise InvalidInput("Configuración inválida", {"errors": exc.errors(include_url=False)}) from exc


def run(config: RunConfig) -> None:
    start = time.perf_counter()
    table = COMMANDS[config.subcommand](config)
    write_table(table, config)
    logger.info(f"[CLI] {config.subcommand}: {len(table.rows)} filas en {time.perf_counter() - start:.3f}s")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=LOG_LEVEL, stream=sys.stderr)
    setup_logging_filters()
    try:
        run(config_from_args(args))
    except SpectralError as exc:
        logger.debug(f"[CLI] {type(exc).__name__}: {exc.detail}")
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValidationError as exc:
        logger.debug(f"[CLI] ValidationError: {exc.errors(include_url=False)}")
        print(f"error: InvalidInput: {exc.error_count()} parámetro(s) no validan", file=sys.stderr)
        return InvalidInput.exit_code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
