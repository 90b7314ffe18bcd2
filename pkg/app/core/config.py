# app/core/config.py

import os
from dotenv import load_dotenv

load_dotenv()


def _float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(item) for item in raw.split(",") if item.strip())


# Álgebra lineal densa
PIVOT_TOL = float(os.getenv("PIVOT_TOL", "1e-12"))  # relativo a la norma máxima de fila
POLY_STRIP_TOL = float(os.getenv("POLY_STRIP_TOL", "1e-12"))  # relativo al max |coef|
MAX_DENSE_SIZE = int(os.getenv("MAX_DENSE_SIZE", "64"))

# Raíces de polinomios (Aberth–Ehrlich)
ROOT_TOL = float(os.getenv("ROOT_TOL", "1e-10"))  # error hacia atrás aceptado
ROOT_MAX_ITER = int(os.getenv("ROOT_MAX_ITER", "500"))
ROOT_CLUSTER_TOL = float(os.getenv("ROOT_CLUSTER_TOL", "1e-6"))

# Funciones de Weyl
GENERICITY_TOL = float(os.getenv("GENERICITY_TOL", "1e-10"))  # |c_j| mínimo
SIMPLICITY_TOL = float(os.getenv("SIMPLICITY_TOL", "1e-8"))  # gap mínimo relativo al spread
SELF_ADJOINT_TOL = float(os.getenv("SELF_ADJOINT_TOL", "1e-12"))
POLE_TOL = float(os.getenv("POLE_TOL", "1e-12"))

# Perturbaciones de rango dos
REAL_SPECTRUM_TOL = float(os.getenv("REAL_SPECTRUM_TOL", "1e-8"))  # |Im λ| < tol·(1+|λ|)
INTERLACE_TIE_TOL = float(os.getenv("INTERLACE_TIE_TOL", "1e-9"))
JORDAN_TOL = float(os.getenv("JORDAN_TOL", "1e-6"))
AXIS_TOL = float(os.getenv("AXIS_TOL", "1e-6"))
PHASE_EPS_SCHEDULE = _float_list(os.getenv("PHASE_EPS_SCHEDULE", "1e-3,1e-4,1e-5"))
EXTRAPOLATION_RTOL = float(os.getenv("EXTRAPOLATION_RTOL", "1e-2"))

# Valores singulares
ORTHOGONALITY_TOL = float(os.getenv("ORTHOGONALITY_TOL", "1e-10"))  # |u*B⁻¹v| relativo a ‖B⁻¹‖
PARALLEL_TOL = float(os.getenv("PARALLEL_TOL", "1e-10"))  # seno del ángulo entre B*v y u
LIMIT_AGREEMENT_TOL = float(os.getenv("LIMIT_AGREEMENT_TOL", "1e-6"))  # polinomio límite vs compresión, relativo a σ₁(B)

# Medidas y transformadas de Cauchy
STIELTJES_EPS_SCHEDULE = _float_list(os.getenv("STIELTJES_EPS_SCHEDULE", "1e-3,1e-5,1e-7"))
JACOBI_TRUNCATION = int(os.getenv("JACOBI_TRUNCATION", "500"))
ATOM_MASS_TOL = float(os.getenv("ATOM_MASS_TOL", "1e-6"))
POLE_MASK_RADIUS = float(os.getenv("POLE_MASK_RADIUS", "1e-4"))
DENSITY_RTOL = float(os.getenv("DENSITY_RTOL", "1e-3"))
MASS_TOL = float(os.getenv("MASS_TOL", "1e-8"))

# Clase de Meixner libre
MEIXNER_TOL = float(os.getenv("MEIXNER_TOL", "1e-10"))

# CLI y barridos
DEFAULT_SEED = int(os.getenv("DEFAULT_SEED", "12345"))
GRID_WORKERS = int(os.getenv("GRID_WORKERS", "1"))
OUTPUT_FLOAT_FORMAT = os.getenv("OUTPUT_FLOAT_FORMAT", ".12g")

# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
LOG_EXCLUDE_PATTERNS = [p for p in os.getenv("LOG_EXCLUDE_PATTERNS", "").split(",") if p.strip()]
LOG_REPEAT_LIMIT = int(os.getenv("LOG_REPEAT_LIMIT", "5"))
