"""Linear subspace (dictionary) models with Gaussian latents.

Observations are ``y_i = D z_i + eps_i`` with ``z_i ~ N(0, tau2 I_d)`` and
isotropic noise, so marginally ``y_i ~ N(0, tau2 D D^T + sigma2 I_p)``.  A
"minimal" dictionary uses r = dim span(D) columns; an "overcomplete" one uses
more columns for the same span.  The marginal law depends on D only through
D D^T, which is what makes column count a representation choice rather than a
statistical one — and what BIC's per-column penalty gets wrong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from ._linalg import chol_logdet, numerical_rank, psd_spectral_rank, spd_cholesky
from ._rng import substream
from .evidence import LOG_2PI, bic_score, rlct_score
from .rlct import analytic_rlct


@dataclass(frozen=True)
class DictionarySpec:
    """A dictionary with its latent and noise scales and span dimension."""

    p: int              # observation dimension
    d: int              # number of columns
    D: np.ndarray       # (p, d) dictionary
    tau2: float         # latent prior variance
    sigma2: float       # noise variance
    r: int              # dimension of the column span (numerical rank of D)

    def __post_init__(self) -> None:
        if self.D.shape != (self.p, self.d):
            raise ValueError(f"D shape {self.D.shape} != ({self.p}, {self.d})")
        if self.sigma2 <= 0 or self.tau2 <= 0:
            raise ValueError("sigma2 and tau2 must be positive")
        got = numerical_rank(self.D)
        if got != self.r:
            raise ValueError(f"D has numerical rank {got}, expected {self.r}")


@dataclass(frozen=True)
class DictionaryDataset:
    """n observation vectors stored as rows."""

    n: int
    Y: np.ndarray   # (n, p)

    def __post_init__(self) -> None:
        if self.Y.shape[0] != self.n:
            raise ValueError(f"Y has {self.Y.shape[0]} rows, expected {self.n}")


def make_dictionary_spec(D: np.ndarray, tau2: float, sigma2: float) -> DictionarySpec:
    """Wrap a dictionary matrix, computing its span dimension."""
    D = np.asarray(D, dtype=float)
    p, d = D.shape
    return DictionarySpec(p=p, d=d, D=D, tau2=tau2, sigma2=sigma2, r=numerical_rank(D))


def marginal_covariance(spec: DictionarySpec) -> np.ndarray:
    """Marginal observation covariance tau2 D D^T + sigma2 I_p."""
    return spec.tau2 * (spec.D @ spec.D.T) + spec.sigma2 * np.eye(spec.p)


def dict_log_likelihood(spec: DictionarySpec, data: DictionaryDataset) -> float:
    """Exact Gaussian log likelihood of the data under the marginal law.

    Uses an SPD factorization of the marginal covariance; quadratic forms are
    accumulated through triangular solves, never an explicit inverse.
    """
    if data.Y.shape[1] != spec.p:
        raise ValueError(
            f"data dimension {data.Y.shape[1]} != observation dimension {spec.p}"
        )
    sigma_y = marginal_covariance(spec)
    L = spd_cholesky(sigma_y, context="dict_log_likelihood")
    Z = scipy.linalg.solve_triangular(L, data.Y.T, lower=True)
    quad = float(np.sum(Z * Z))
    return -0.5 * (data.n * (spec.p * LOG_2PI + chol_logdet(L)) + quad)


def sample_dictionary_data(spec: DictionarySpec, n: int, seed: int) -> DictionaryDataset:
    """Draw n observations y_i = D z_i + eps_i, deterministic per seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = substream(seed, "dict-data", n)
    Z = math.sqrt(spec.tau2) * rng.standard_normal((n, spec.d))
    E = math.sqrt(spec.sigma2) * rng.standard_normal((n, spec.p))
    return DictionaryDataset(n=n, Y=Z @ spec.D.T + E)


def make_dictionary_pair(
    p: int,
    r: int,
    d_over: int,
    seed: int,
    tau2: float = 1.0,
    sigma2: float = 1.0,
) -> tuple[DictionarySpec, DictionarySpec]:
    """A minimal and an overcomplete dictionary sharing span and marginal law.

    The minimal dictionary has r orthonormalized Gaussian columns.  The
    overcomplete one is ``D' = D M`` where M (r x d_over) is a Gaussian draw
    with orthonormalized rows, so M M^T = I_r.  That makes D' D'^T = D D^T:
    the two specs put exactly the same distribution on the observations, and
    differ only in how many coordinates parameterize it.  (A generic
    full-row-rank M would preserve the span but change the marginal
    covariance, and the two fixed-parameter evidences would then drift apart
    linearly in n instead of staying O(1).)
    """
    if not 0 < r <= p:
        raise ValueError(f"need 0 < r <= p, got r={r}, p={p}")
    if d_over <= r:
        raise ValueError(f"overcomplete column count must exceed r={r}, got {d_over}")
    basis_rng = substream(seed, "dict-basis")
    D_min, _ = np.linalg.qr(basis_rng.standard_normal((p, r)))
    mix_rng = substream(seed, "dict-mix")
    Q, _ = np.linalg.qr(mix_rng.standard_normal((d_over, r)))
    M = Q.T   # (r, d_over), rows orthonormal
    if numerical_rank(M) != r:
        raise ValueError("mixing matrix lost row rank; perturb the seed")
    D_over = D_min @ M
    minimal = DictionarySpec(p=p, d=r, D=D_min, tau2=tau2, sigma2=sigma2, r=r)
    overcomplete = DictionarySpec(
        p=p, d=d_over, D=D_over, tau2=tau2, sigma2=sigma2, r=r
    )
    return minimal, overcomplete


def gram_spectrum(spec: DictionarySpec) -> np.ndarray:
    """Eigenvalues of D^T D in descending order.

    Exactly r of them sit above the numerical-rank threshold; an overcomplete
    dictionary shows the remaining d - r as a block of near-zero values.
    """
    eigs = np.linalg.eigvalsh(spec.D.T @ spec.D)
    return eigs[::-1].copy()


def spectrum_rank(eigenvalues: np.ndarray, size: int) -> int:
    """Count of Gram eigenvalues that are numerically nonzero."""
    return psd_spectral_rank(eigenvalues, size)


def ml_fit_term(
    data: DictionaryDataset, shape_d: int, tau2: float, sigma2: float
) -> float:
    """Maximized log likelihood over all dictionaries with shape_d columns.

    With known noise variance the optimum has a closed form: eigendecompose
    the sample second moment C = (1/n) Y^T Y, place signal variance
    ``max(ell_j - sigma2, 0)`` on the top min(shape_d, p) sample eigenvectors,
    and evaluate the Gaussian log likelihood under the resulting covariance.
    Directions whose sample eigenvalue falls below sigma2 clamp to pure noise,
    which is why extra columns beyond the data rank buy only an O(1) gain.
    ``tau2`` does not move the optimum (the latent scale is absorbed into the
    dictionary); it is accepted so callers can pass the model parametrization.
    """
    del tau2
    if data.n < 1:
        raise ValueError(f"need at least one observation, got n={data.n}")
    if shape_d < 0:
        raise ValueError(f"column count must be nonnegative, got {shape_d}")
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    n, p = data.Y.shape
    C = data.Y.T @ data.Y / n
    ell = np.linalg.eigvalsh(C)[::-1]          # descending
    k = min(shape_d, p)
    model_var = np.full(p, sigma2)
    model_var[:k] = np.maximum(ell[:k], sigma2)
    return -0.5 * n * (
        p * LOG_2PI + float(np.sum(np.log(model_var) + ell / model_var))
    )


@dataclass(frozen=True)
class DictionaryComparison:
    """Scores for a minimal/overcomplete pair on one shared dataset.

    ``fit_*`` are maximized log likelihoods over each shape.  The headline
    ``bic_*`` and ``rlct_*`` scores apply the per-shape (columns/2) log n and
    shared (r/2) log n penalties to a common fit term — the minimal-shape ML
    fit, which the overcomplete shape matches up to a bounded clamping gain —
    so the score gaps isolate the penalty difference.  Two alternative
    readings remain inspectable: ``*_ml`` scores use the overcomplete shape's
    own ML fit, and ``*_at_truth`` scores use the exact log likelihoods at the
    generating dictionaries.
    """

    n: int
    seed: int
    exact_minimal: float
    exact_overcomplete: float
    fit_minimal: float
    fit_overcomplete: float
    bic_minimal: float
    bic_overcomplete: float
    rlct_minimal: float
    rlct_overcomplete: float
    bic_overcomplete_ml: float
    rlct_overcomplete_ml: float
    bic_minimal_at_truth: float
    bic_overcomplete_at_truth: float
    rlct_minimal_at_truth: float
    rlct_overcomplete_at_truth: float


def dictionary_comparison(
    pair: tuple[DictionarySpec, DictionarySpec], n: int, seed: int
) -> DictionaryComparison:
    """Evaluate both members of a pair on one dataset drawn from the minimal spec."""
    minimal, overcomplete = pair
    if minimal.r != overcomplete.r:
        raise ValueError(
            f"pair members disagree on span dimension: {minimal.r} vs {overcomplete.r}"
        )
    data = sample_dictionary_data(minimal, n, seed)
    exact_min = dict_log_likelihood(minimal, data)
    exact_over = dict_log_likelihood(overcomplete, data)
    fit_min = ml_fit_term(data, minimal.d, minimal.tau2, minimal.sigma2)
    fit_over = ml_fit_term(data, overcomplete.d, overcomplete.tau2, overcomplete.sigma2)
    lam = analytic_rlct(minimal.r).lam
    return DictionaryComparison(
        n=n,
        seed=seed,
        exact_minimal=exact_min,
        exact_overcomplete=exact_over,
        fit_minimal=fit_min,
        fit_overcomplete=fit_over,
        bic_minimal=bic_score(fit_min, minimal.d, n),
        bic_overcomplete=bic_score(fit_min, overcomplete.d, n),
        rlct_minimal=rlct_score(fit_min, lam, n),
        rlct_overcomplete=rlct_score(fit_min, lam, n),
        bic_overcomplete_ml=bic_score(fit_over, overcomplete.d, n),
        rlct_overcomplete_ml=rlct_score(fit_over, lam, n),
        bic_minimal_at_truth=bic_score(exact_min, minimal.d, n),
        bic_overcomplete_at_truth=bic_score(exact_over, overcomplete.d, n),
        rlct_minimal_at_truth=rlct_score(exact_min, lam, n),
        rlct_overcomplete_at_truth=rlct_score(exact_over, lam, n),
    )
