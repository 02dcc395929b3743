"""Scalar diagnostics and closed-form recovery-bound formulas.

The bound helpers evaluate the dimension-free recovery guarantees for
RIP-based sensing and for uniform-entry completion. Degenerate parameter
regions (scale parameter at its admissible limit, vacuous probability)
return infinite/clamped sentinel values carrying ``valid=False`` rather
than raising, so sweep code can chart "bound vacuous here" regions; values
outside the admissible range raise ParameterOutOfRangeError.

Spectral sums follow the package convention: n in the bound formulas is the
number of singular values, min(n, n').
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterOutOfRangeError, ShapeMismatchError, ZeroMatrixError
from .linalg import as_matrix, singular_values


def nuclear_norm(X) -> float:
    """Sum of singular values."""
    return float(np.sum(singular_values(X)))


def frobenius_norm(X) -> float:
    """Root sum of squared entries."""
    return float(np.linalg.norm(as_matrix(X)))


def spectral_norm(X) -> float:
    """Largest singular value."""
    return float(singular_values(X)[0])


def effective_rank(X) -> float:
    """exp of the Shannon entropy of the normalized singular values.

    A smooth rank surrogate in [1, min(n, n')]; zero singular values
    contribute nothing (0 log 0 = 0).
    """
    s = singular_values(X)
    total = float(np.sum(s))
    if total <= 0.0:
        raise ZeroMatrixError("effective rank undefined for the zero matrix")
    p = s[s > 0.0] / total
    return float(np.exp(-np.sum(p * np.log(p))))


def recon_error(X, Xstar) -> float:
    """Frobenius distance to the planted matrix."""
    X = as_matrix(X)
    Xstar = as_matrix(Xstar)
    if X.shape != Xstar.shape:
        raise ShapeMismatchError(f"shape {X.shape} != ground truth {Xstar.shape}")
    return float(np.linalg.norm(X - Xstar))


@dataclass(frozen=True)
class BoundInputs:
    """Inputs shared by the recovery-bound formulas.

    ``beta`` feeds the rectangular (hypentropy) forms, ``alpha`` the PSD
    (entropy) forms; ``delta`` is the RIP constant, ``c`` the completion
    oversampling exponent, ``mu0``/``mu1`` the coherence parameters.
    """

    nuclear_star: float
    n: int
    nprime: int
    r: int
    delta: float = 0.0
    beta: float | None = None
    alpha: float | None = None
    m: int = 0
    c: float = 1.1
    mu0: float = 1.0
    mu1: float = 1.0


class Bound(NamedTuple):
    value: float
    valid: bool


class CompletionBound(NamedTuple):
    value: float
    sample_requirement: int
    probability: float  # lower bound on the probability the guarantee holds
    m_sufficient: bool
    valid: bool


def _c_delta(delta: float) -> float:
    if not 0.0 <= delta < 1.0:
        raise ParameterOutOfRangeError(f"delta must lie in [0, 1), got {delta}")
    root = math.sqrt(2.0 / 3.0)
    return 0.5 * (1.0 - root - delta * (1.0 + root))


def _scale_terms(b: BoundInputs, psd_form: bool) -> tuple[float, float, bool]:
    """Common Delta machinery for both bound formulas.

    Returns (numerator_term, delta_coefficient_validity) packed as
    (term, log_ratio, degenerate): ``term`` is Delta*nu plus the beta
    correction (PSD form has no correction), ``degenerate`` marks a Delta
    denominator at or below zero (bound is an infinite sentinel there).
    """
    nu = float(b.nuclear_star)
    if not (nu > 0.0 and math.isfinite(nu)):
        raise ParameterOutOfRangeError(f"nuclear_star must be positive, got {nu}")
    n_small = min(b.n, b.nprime)
    if psd_form:
        scale = b.alpha
        name = "alpha"
        limit = nu / (math.e * n_small)
        log_base = math.log(n_small)
    else:
        scale = b.beta
        name = "beta"
        limit = nu / (1.05 * math.e * n_small)
        log_base = math.log(1.05 * n_small)
    if scale is None or not (scale > 0.0 and math.isfinite(scale)):
        raise ParameterOutOfRangeError(f"{name} must be a positive real, got {scale}")
    if scale > limit:
        raise ParameterOutOfRangeError(
            f"{name} = {scale:.6e} violates the precondition {name} <= {limit:.6e}"
        )
    log_ratio = math.log(nu / scale) - 1.0
    if log_base <= 0.0:
        return math.inf, log_ratio, True
    den = log_ratio / log_base - 1.0
    if den <= 0.0:
        return math.inf, log_ratio, True
    delta_coef = 1.0 / den
    term = delta_coef * nu
    if not psd_form:
        term += (1.0 + delta_coef) * n_small * scale / log_ratio
    return term, log_ratio, False


def theorem3_bound(b: BoundInputs, psd_form: bool) -> Bound:
    """Closed-form recovery bound for RIP sensing: ||X_inf - X*||_F <= value.

    Rectangular form: (Delta_beta*nu + (1+Delta_beta)*n*beta/(log(nu/beta)-1))
    / (C_delta*sqrt(3r)); PSD form replaces the numerator by Delta_alpha*nu.
    """
    c_delta = _c_delta(b.delta)
    term, _, degenerate = _scale_terms(b, psd_form)
    if degenerate or c_delta <= 0.0:
        return Bound(math.inf, False)
    return Bound(term / (c_delta * math.sqrt(3.0 * b.r)), True)


def theorem4_bound(b: BoundInputs, psd_form: bool) -> CompletionBound:
    """Closed-form completion guarantee: bound, sample requirement, probability.

    value: 6 * numerator-term * (1 + sqrt(128*c*n*n'*log^2(n')/(9m)))
    sample_requirement: ceil(32*c*max(mu0^2, mu1)*r*(n+n')*log^2(2n'))
    probability: max(0, 1 - 6*log(n')*(n+n')^(2-2c) - n'^(2-2*sqrt(c)))

    The probability is the guarantee's success-probability lower bound; it is
    clamped at 0 and flagged vacuous when the formula goes negative (c too
    close to 1 for the given dimensions).
    """
    if not (b.c > 1.0 and math.isfinite(b.c)):
        raise ParameterOutOfRangeError(f"c must exceed 1, got {b.c}")
    if b.m < 1:
        raise ParameterOutOfRangeError(f"m must be a positive integer, got {b.m}")
    if not (b.mu0 > 0.0 and b.mu1 > 0.0):
        raise ParameterOutOfRangeError("mu0 and mu1 must be positive")
    term, _, degenerate = _scale_terms(b, psd_form)
    n, nprime = b.n, b.nprime
    lg = math.log(nprime)
    amplifier = 1.0 + math.sqrt(128.0 * b.c * n * nprime * lg * lg / (9.0 * b.m))
    value = math.inf if degenerate else 6.0 * term * amplifier
    req = math.ceil(
        32.0 * b.c * max(b.mu0**2, b.mu1) * b.r * (n + nprime)
        * math.log(2.0 * nprime) ** 2
    )
    prob = (
        1.0
        - 6.0 * lg * (n + nprime) ** (2.0 - 2.0 * b.c)
        - nprime ** (2.0 - 2.0 * math.sqrt(b.c))
    )
    vacuous = prob <= 0.0
    prob = max(prob, 0.0)
    return CompletionBound(
        value=value,
        sample_requirement=int(req),
        probability=prob,
        m_sufficient=b.m >= req,
        valid=not (degenerate or vacuous),
    )
