"""
Damped Newton method for strictly convex objectives with tridiagonal Hessian.

Each step solves H Δ = -g with a banded Cholesky factorization and
backtracks (halving) until the Armijo condition holds. An optional step
bound keeps iterates inside an open feasible region.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, solveh_banded

from ..errors import ConvergenceError

logger = logging.getLogger(__name__)

DEFAULT_GRAD_TOL = 1e-12
DEFAULT_MAX_ITER = 200
ARMIJO = 1e-4
MAX_HALVINGS = 60
# Newton decrement below this fraction of the objective is roundoff.
DECREMENT_FLOOR = 1e-15
# share of the distance to the feasible boundary a single step may cover
BOUNDARY_FRACTION = 0.99

Objective = Callable[[np.ndarray], float]
# returns (gradient, hessian diagonal, hessian super-diagonal)
Derivatives = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray, np.ndarray]]
# largest alpha with x + alpha·step still feasible (inf when unbounded)
StepBound = Callable[[np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    value: float
    gradient_norm: float
    decrement: float
    iterations: int


def _solve_tridiagonal(diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    banded = np.zeros((2, diag.size))
    banded[0, 1:] = upper
    banded[1, :] = diag
    return solveh_banded(banded, rhs)


def damped_newton(
    objective: Objective,
    derivatives: Derivatives,
    x0: np.ndarray,
    grad_tol: float = DEFAULT_GRAD_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    step_bound: Optional[StepBound] = None,
) -> NewtonResult:
    """Minimize a strictly convex objective from x0.

    Stops when max|g| <= grad_tol·max(E, 1) or when the Newton decrement
    drops to the roundoff floor of E. With step_bound, every step stops
    short of the feasible boundary by BOUNDARY_FRACTION.
    """
    x = np.array(x0, dtype=float)
    value = objective(x)
    for iteration in range(max_iter + 1):
        gradient, diag, upper = derivatives(x)
        grad_norm = float(np.max(np.abs(gradient))) if gradient.size else 0.0
        scale = max(abs(value), 1.0)
        if grad_norm <= grad_tol * scale:
            logger.debug(f"Newton converged in {iteration} iterations (|g|={grad_norm:.3e})")
            return NewtonResult(x, value, grad_norm, 0.0, iteration)
        if iteration == max_iter:
            break

        try:
            step = _solve_tridiagonal(diag, upper, -gradient)
        except (LinAlgError, ValueError) as e:
            raise ConvergenceError(f"Newton system is not positive definite at iteration {iteration}: {e}") from e
        decrement = float(-gradient @ step)
        if decrement <= DECREMENT_FLOOR * abs(value):
            logger.debug(
                f"Newton stopped at roundoff floor after {iteration} iterations "
                f"(|g|={grad_norm:.3e}, decrement={decrement:.3e})"
            )
            return NewtonResult(x, value, grad_norm, decrement, iteration)

        alpha = 1.0
        if step_bound is not None:
            alpha = min(1.0, BOUNDARY_FRACTION * step_bound(x, step))
        for _ in range(MAX_HALVINGS):
            candidate = x + alpha * step
            candidate_value = objective(candidate)
            if candidate_value <= value - ARMIJO * alpha * decrement:
                break
            alpha *= 0.5
        else:
            if decrement <= 1e3 * DECREMENT_FLOOR * abs(value):
                logger.warning(
                    f"Line search stagnated at iteration {iteration}; accepting roundoff-limited minimum "
                    f"(decrement={decrement:.3e})"
                )
                return NewtonResult(x, value, grad_norm, decrement, iteration)
            raise ConvergenceError(
                f"Line search failed at iteration {iteration} (decrement {decrement:.3e}, |g|={grad_norm:.3e})"
            )
        logger.debug(f"Newton iteration {iteration}: E={candidate_value:.16e}, step={alpha}, |g|={grad_norm:.3e}")
        x = candidate
        value = candidate_value

    raise ConvergenceError(f"Newton did not converge in {max_iter} iterations (|g|={grad_norm:.3e})")
