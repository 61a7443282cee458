"""16-projection polarization tomography: count simulation, linear
inversion, and maximum-likelihood reconstruction.

Analyzer convention: R = (1, -i)/sqrt(2), L = (1, i)/sqrt(2). Flipping the
convention only flips the sign of imaginary parts of reconstructed
off-diagonals; all shipped tests use this convention.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateInputError,
    ParseError,
    ValidationError,
)
from . import states

_INV_SQRT2 = 1 / np.sqrt(2)

ANALYZER_STATES = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "D": np.array([1, 1], dtype=complex) * _INV_SQRT2,
    "A": np.array([1, -1], dtype=complex) * _INV_SQRT2,
    "R": np.array([1, -1j], dtype=complex) * _INV_SQRT2,
    "L": np.array([1, 1j], dtype=complex) * _INV_SQRT2,
}

# Standard two-photon tomography settings, in fixed order.
CANONICAL_LABELS = (
    "HH", "HV", "VV", "VH",
    "RH", "RV", "DV", "DH",
    "DR", "DD", "RD", "HD",
    "VD", "VL", "HL", "RL",
)

# Indices of the computational-basis settings used for normalization
# (their Born probabilities sum to 1 for any state).
_COMP_LABELS = ("HH", "HV", "VH", "VV")


@dataclass(frozen=True)
class Projector:
    """A rank-1 two-photon polarization projector |ab><ab|."""

    label: str
    matrix: np.ndarray


def projector(label):
    """Build the projector for a two-character analyzer setting like 'DR'."""
    if len(label) != 2 or any(ch not in ANALYZER_STATES for ch in label):
        raise ConfigError(f"unknown analyzer setting {label!r}")
    ket = np.kron(ANALYZER_STATES[label[0]], ANALYZER_STATES[label[1]])
    return Projector(label, np.outer(ket, ket.conj()))


def canonical_projection_set():
    """The 16 canonical projectors, in fixed order."""
    return [projector(lab) for lab in CANONICAL_LABELS]


_CANONICAL = None


def _canonical():
    global _CANONICAL
    if _CANONICAL is None:
        _CANONICAL = canonical_projection_set()
    return _CANONICAL


def _stack(projectors):
    return np.stack([p.matrix for p in projectors])


def expected_probabilities(rho, projectors=None):
    """Born-rule probabilities p_nu = Re Tr(rho P_nu) for each setting."""
    if projectors is None:
        projectors = _canonical()
    rho = np.asarray(rho, dtype=complex)
    return np.einsum("nij,ji->n", _stack(projectors), rho).real


@dataclass
class CountVector:
    """Coincidence counts per projector plus the unit-probability scale."""

    counts: np.ndarray
    total_scale: float

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=float)
        if self.counts.shape != (16,):
            raise ValidationError(f"expected 16 counts, got shape {self.counts.shape}")
        if np.any(self.counts < 0):
            raise ValidationError("counts must be non-negative")
        if not self.total_scale > 0:
            raise ValidationError("total_scale must be positive")


def default_total_scale(counts, projectors=None):
    """Counts expected for a unit-probability projector: the sum over the
    computational-basis settings."""
    if projectors is None:
        projectors = _canonical()
    labels = [p.label for p in projectors]
    idx = [labels.index(lab) for lab in _COMP_LABELS]
    return float(np.sum(np.asarray(counts, dtype=float)[idx]))


def simulate_counts(rho, total_scale, seed, projectors=None):
    """Poisson-sample coincidence counts for every setting.

    Deterministic in (rho, total_scale, seed, projectors).
    """
    if not total_scale > 0:
        raise ValidationError("total_scale must be positive")
    probs = expected_probabilities(rho, projectors)
    rng = np.random.default_rng(seed)
    counts = rng.poisson(total_scale * np.clip(probs, 0, None)).astype(float)
    return CountVector(counts, float(total_scale))


def gram_matrix(projectors):
    """Real 16x16 overlap matrix G[u,v] = Tr(P_u P_v)."""
    stack = _stack(projectors)
    return np.einsum("uij,vji->uv", stack, stack).real


def dual_basis(projectors):
    """Matrices M_nu with Tr(P_u M_v) = delta_uv, via Gram inversion."""
    g = gram_matrix(projectors)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError as exc:
        raise ConfigError("projector set is not informationally complete") from exc
    if np.linalg.cond(g) > 1e12:
        raise ConfigError("projector Gram matrix is numerically singular")
    stack = _stack(projectors)
    return np.einsum("vu,uij->vij", ginv, stack)


def linear_reconstruct(counts, projectors=None):
    """Linear-inversion estimate rho = sum_nu r_nu M_nu.

    Hermitian and unit-trace by construction, but may carry negative
    eigenvalues for noisy counts.
    """
    if projectors is None:
        projectors = _canonical()
    if isinstance(counts, CountVector):
        raw = counts.counts
    else:
        raw = np.asarray(counts, dtype=float)
    if np.all(raw == 0):
        raise DegenerateInputError("all counts are zero")
    norm = default_total_scale(raw, projectors)
    if norm <= 0:
        raise DegenerateInputError("computational-basis counts are all zero")
    r = raw / norm
    rho = np.einsum("v,vij->ij", r, dual_basis(projectors))
    return (rho + rho.conj().T) / 2


# --- maximum likelihood --------------------------------------------------------
# rho(t) = T T^dag / Tr(T T^dag) with T lower triangular: 4 real diagonal
# parameters followed by (re, im) pairs for the 6 strictly-lower entries.

_LOWER = ((1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2))


def _t_matrix(params):
    t = np.zeros((4, 4), dtype=complex)
    t[np.diag_indices(4)] = params[:4]
    for i, (r, c) in enumerate(_LOWER):
        t[r, c] = params[4 + 2 * i] + 1j * params[5 + 2 * i]
    return t


def _rho_from_params(params):
    t = _t_matrix(params)
    rho = t @ t.conj().T
    tr = np.trace(rho).real
    if tr <= 0:
        return states.totally_mixed()
    return rho / tr


def _params_from_rho(rho):
    w, v = np.linalg.eigh(np.asarray(rho, dtype=complex))
    w = np.clip(w, 0, None)
    rho_psd = (v * w) @ v.conj().T
    rho_psd /= np.trace(rho_psd).real
    t = np.linalg.cholesky(rho_psd + 1e-10 * np.eye(4))
    params = np.empty(16)
    params[:4] = np.diag(t).real
    for i, (r, c) in enumerate(_LOWER):
        params[4 + 2 * i] = t[r, c].real
        params[5 + 2 * i] = t[r, c].imag
    return params


def _neg_log_likelihood(params, raw_counts, scale, stack):
    rho = _rho_from_params(params)
    p = np.einsum("nij,ji->n", stack, rho).real
    model = scale * p
    var = np.maximum(model, 1e-9 * scale)
    return float(np.sum((model - raw_counts) ** 2 / (2 * var)))


def mle_reconstruct(counts, projectors=None, max_evals=200_000):
    """Physical (Hermitian, unit-trace, PSD) estimate maximizing the
    Gaussian-approximated Poisson likelihood.

    Derivative-free simplex search over the 16 triangular parameters,
    started from the clamped linear reconstruction; restarted once from
    the maximally mixed state if the first run exhausts its budget.
    """
    if projectors is None:
        projectors = _canonical()
    if isinstance(counts, CountVector):
        raw = counts.counts
        scale = counts.total_scale
    else:
        raw = np.asarray(counts, dtype=float)
        scale = default_total_scale(raw, projectors)
    if not np.any(raw > 0):
        raise DegenerateInputError("at least one positive count required")
    stack = _stack(projectors)

    start = _params_from_rho(linear_reconstruct(raw, projectors))
    best = None
    for x0 in (start, _params_from_rho(states.totally_mixed())):
        res = minimize(
            _neg_log_likelihood,
            x0,
            args=(raw, scale, stack),
            method="Nelder-Mead",
            options={
                "maxfev": max_evals,
                "fatol": 1e-10,
                "xatol": 1e-10,
                "adaptive": True,
            },
        )
        if best is None or res.fun < best.fun:
            best = res
        if res.success:
            break
    if not best.success:
        spread = float(np.max(np.ptp(best.final_simplex[0], axis=0)))
        raise ConvergenceError(
            f"simplex search did not converge within {max_evals} evaluations",
            best_state=_rho_from_params(best.x),
            simplex_size=spread,
        )
    setattr(mle_reconstruct, "last_nfev", int(best.nfev))
    return _rho_from_params(best.x)


# --- count file I/O -------------------------------------------------------------
# Plain text, exactly 16 "label,count" rows, '#' comments; labels may appear
# in any order and are matched against the canonical set.


def write_counts(cv, path):
    lines = ["# label,count"]
    for lab, n in zip(CANONICAL_LABELS, cv.counts):
        lines.append(f"{lab},{float(n)!r}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_counts(path, total_scale=None):
    """Parse a 16-row count file into a CountVector.

    total_scale defaults to the computational-basis count sum.
    """
    seen = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'label,count'")
            lab = parts[0].strip().upper()
            if lab not in CANONICAL_LABELS:
                raise ParseError(f"{path}:{lineno}: unknown label {lab!r}")
            if lab in seen:
                raise ParseError(f"{path}:{lineno}: duplicate label {lab!r}")
            try:
                value = float(parts[1])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: bad count {parts[1]!r}") from exc
            if value < 0:
                raise ParseError(f"{path}:{lineno}: negative count")
            seen[lab] = value
    missing = [lab for lab in CANONICAL_LABELS if lab not in seen]
    if missing:
        raise ParseError(f"{path}: missing labels {missing}")
    counts = np.array([seen[lab] for lab in CANONICAL_LABELS])
    if total_scale is None:
        total_scale = default_total_scale(counts)
    if total_scale <= 0:
        raise DegenerateInputError(f"{path}: computational-basis counts are zero")
    return CountVector(counts, float(total_scale))
