"""Multi-pair coincidence model for a pulsed entangled-pair source.

Pairs are generated per pulse with Poisson statistics (mean mu); each pair
is |HH> or |VV> with probability 1/2. Two threshold detectors sit behind
polarization analyzers, one per arm. alpha is the per-photon detection
efficiency. eta is the simultaneous-detection efficiency: a pair falls
fully inside the coincidence window with probability eta, otherwise it
contributes a lone photon to either arm with probability (1-eta)/2 each.

The per-pulse coincidence probabilities for the three projection classes
HH (parallel linear), HV (crossed linear) and HR (linear-circular) follow
from averaging the threshold-detector response over pair polarizations.
With beta = 1-alpha, c = (1+beta)/2 and d = (1+beta**2)/2, the x-pair
class probabilities reduce to

    f(x) = 1 - 2 c**x + d**x          (HH)
    g(x) = 1 - 2 c**x + beta**x       (HV)
    h(x) = (1 - c**x)**2              (HR)

and the window-split refinement with k simultaneous pairs, m lone photons
in arm 2 and a = x-k-m lone photons in arm 1 reduces to

    f(x,k,m) = 1 - c**(k+a) - c**(k+m) + d**k * c**(a+m)
    g(x,k,m) = 1 - c**(k+a) - c**(k+m) + beta**k * c**(a+m)
    h(x,k,m) = (1 - c**(k+a)) * (1 - c**(k+m))

Each closed form is the expectation E[(1 - beta**n1)(1 - beta**n2)] over
binomial polarization splits; the test suite checks them term by term
against the raw binomial sums and against a Monte Carlo simulation of the
detector model. Note the single-bracket exponent {1 - (1-alpha)**j} in the
HR sums: collapsing it to alpha**j would contradict the small-mu asymptote
alpha^2 (mu/4 + mu^2/4) and the Monte Carlo model.
"""

import math
import warnings
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .errors import DegenerateInputError
from . import states, tomography

CLASSES = ("HH", "HV", "HR")


class TruncationWarning(UserWarning):
    """The pair-number series was truncated too early for the given mu."""


@dataclass(frozen=True)
class SourceParams:
    """Source and detection parameters for the coincidence model."""

    mu: float
    alpha: float
    eta: float = 1.0
    n_max: int = 15

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError(f"mu={self.mu} must be >= 0")
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha={self.alpha} must be in (0, 1]")
        if not 0 <= self.eta <= 1:
            raise ValueError(f"eta={self.eta} must be in [0, 1]")
        if self.n_max < 1:
            raise ValueError(f"n_max={self.n_max} must be >= 1")

    @property
    def truncation_adequate(self):
        return self.n_max >= math.ceil(self.mu + 6 * math.sqrt(self.mu))


@dataclass(frozen=True)
class RateTriple:
    """Per-pulse coincidence probabilities for the three projection classes."""

    r_hh: float
    r_hv: float
    r_hr: float


@dataclass(frozen=True)
class MonteCarloRates(RateTriple):
    """Empirical rates with binomial standard errors."""

    se_hh: float
    se_hv: float
    se_hr: float


@dataclass(frozen=True)
class PowerCalibration:
    """Linear conversion mu = pairs_per_power * excitation power."""

    pairs_per_power: float
    power_unit: str = "uW"

    def __post_init__(self):
        if not self.pairs_per_power > 0:
            raise ValueError("pairs_per_power must be positive")


def poisson_pmf(x, mu):
    """P(X = x) for X ~ Poisson(mu); log-space for large x."""
    if x < 0 or x != int(x):
        raise ValueError(f"x={x} must be a non-negative integer")
    x = int(x)
    if mu < 0:
        raise ValueError(f"mu={mu} must be >= 0")
    if mu == 0:
        return 1.0 if x == 0 else 0.0
    if x <= 20:
        return math.exp(-mu) * mu**x / math.factorial(x)
    return math.exp(x * math.log(mu) - mu - math.lgamma(x + 1))


@lru_cache(maxsize=None)
def class_prob_unprimed(x, alpha, cls):
    """Coincidence probability of class cls given x pairs in the window."""
    if cls not in CLASSES:
        raise ValueError(f"unknown projection class {cls!r}")
    if x < 0:
        raise ValueError("x must be >= 0")
    beta = 1 - alpha
    c = (1 + beta) / 2
    if cls == "HH":
        d = (1 + beta * beta) / 2
        return 1 - 2 * c**x + d**x
    if cls == "HV":
        return 1 - 2 * c**x + beta**x
    return (1 - c**x) ** 2


def pair_split_weight(x, k, m, eta):
    """Multinomial probability that of x pairs, k are simultaneous and the
    rest contribute lone photons: m to arm 2, x-k-m to arm 1."""
    if not (0 <= k <= x and 0 <= m <= x - k):
        raise ValueError(f"invalid split (x={x}, k={k}, m={m})")
    a = x - k - m
    return (
        eta**k
        * ((1 - eta) / 2) ** (x - k)
        * math.factorial(x)
        / (math.factorial(k) * math.factorial(a) * math.factorial(m))
    )


@lru_cache(maxsize=None)
def _kernel(x, k, m, alpha, cls):
    beta = 1 - alpha
    c = (1 + beta) / 2
    a = x - k - m
    if cls == "HR":
        return (1 - c ** (k + a)) * (1 - c ** (k + m))
    tail = (beta if cls == "HV" else (1 + beta * beta) / 2) ** k * c ** (a + m)
    return 1 - c ** (k + a) - c ** (k + m) + tail


@lru_cache(maxsize=None)
def class_prob_primed(x, alpha, eta, cls):
    """Class probability for x generated pairs with window-split efficiency eta."""
    if cls not in CLASSES:
        raise ValueError(f"unknown projection class {cls!r}")
    if x < 0:
        raise ValueError("x must be >= 0")
    total = 0.0
    for k in range(x + 1):
        for m in range(x - k + 1):
            total += pair_split_weight(x, k, m, eta) * _kernel(x, k, m, alpha, cls)
    return total


def _check_truncation(p):
    if not p.truncation_adequate:
        warnings.warn(
            f"n_max={p.n_max} may truncate the pair-number series for mu={p.mu}",
            TruncationWarning,
            stacklevel=3,
        )


def rates_unprimed(p):
    """Poisson-averaged class probabilities, ignoring eta (full-window limit)."""
    _check_truncation(p)
    pmf = [poisson_pmf(x, p.mu) for x in range(p.n_max + 1)]
    vals = [
        sum(w * class_prob_unprimed(x, p.alpha, cls) for x, w in enumerate(pmf))
        for cls in CLASSES
    ]
    return RateTriple(*vals)


def rates_primed(p):
    """Poisson-averaged class probabilities including the window split eta."""
    _check_truncation(p)
    pmf = [poisson_pmf(x, p.mu) for x in range(p.n_max + 1)]
    vals = [
        sum(w * class_prob_primed(x, p.alpha, p.eta, cls) for x, w in enumerate(pmf))
        for cls in CLASSES
    ]
    return RateTriple(*vals)


def effective_g(rates):
    """Werner mixing parameter implied by the linear-basis class rates.

    Uses the source symmetry R_VV = R_HH, R_VH = R_HV: the normalized
    crossed-class probability of a Werner state is g/4, so
    g = 2 R_HV / (R_HH + R_HV).
    """
    denom = rates.r_hh + rates.r_hv
    if denom <= 0:
        raise DegenerateInputError("zero coincidence rates: g is undefined")
    return float(np.clip(2 * rates.r_hv / denom, 0.0, 1.0))


def effective_density_matrix(mu):
    """Closed-form output state: ideal/(1+mu) + mu/(1+mu) * I/4."""
    if mu < 0:
        raise ValueError(f"mu={mu} must be >= 0")
    return states.werner(mu / (1 + mu))


def hr_consistency(rates):
    """Normalized HR-class probability; 0.25 for an exact Werner state."""
    total = 2 * (rates.r_hh + rates.r_hv)
    if total <= 0:
        raise DegenerateInputError("zero coincidence rates")
    return rates.r_hr / total


def projection_probabilities_16(rates):
    """Born probabilities over the canonical 16 settings for the Werner
    state implied by the class rates."""
    g = effective_g(rates)
    return tomography.expected_probabilities(states.werner(g))


def monte_carlo_rates(p, shots, seed, batch_size=1_000_000):
    """Monte Carlo estimate of the three class rates under the detector model.

    Per shot: x ~ Poisson(mu) pairs; each pair lands fully in the window
    with probability eta (one photon per arm) or contributes a lone photon
    to a random arm; pair polarization is HH or VV with probability 1/2;
    analyzers transmit deterministically for linear settings and with
    probability 1/2 for the circular one; each transmitted photon fires
    the detector with probability alpha; a coincidence needs >= 1 detection
    in both arms.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    beta = 1 - p.alpha
    hits = np.zeros(3, dtype=np.int64)
    done = 0
    batch_idx = 0
    while done < shots:
        n = min(batch_size, shots - done)
        # independent, reproducible stream per batch
        rng = np.random.default_rng([seed, batch_idx])
        x = rng.poisson(p.mu, n)
        sim = rng.binomial(x, p.eta)
        lone = x - sim
        lone1 = rng.binomial(lone, 0.5)
        lone2 = lone - lone1
        sim_h = rng.binomial(sim, 0.5)
        sim_v = sim - sim_h
        h1 = sim_h + rng.binomial(lone1, 0.5)
        lh2 = rng.binomial(lone2, 0.5)
        h2 = sim_h + lh2
        v2 = sim_v + (lone2 - lh2)
        p_arm1_h = 1 - beta**h1
        det1_hh = rng.random(n) < p_arm1_h
        det2_hh = rng.random(n) < 1 - beta**h2
        det1_hv = rng.random(n) < p_arm1_h
        det2_hv = rng.random(n) < 1 - beta**v2
        det1_hr = rng.random(n) < p_arm1_h
        det2_hr = rng.random(n) < 1 - (1 - p.alpha / 2) ** (h2 + v2)
        hits[0] += np.count_nonzero(det1_hh & det2_hh)
        hits[1] += np.count_nonzero(det1_hv & det2_hv)
        hits[2] += np.count_nonzero(det1_hr & det2_hr)
        done += n
        batch_idx += 1
    rates = hits / shots
    se = np.sqrt(rates * (1 - rates) / shots)
    return MonteCarloRates(*rates, *se)


def g_vs_power_curve(cal, p_template, powers):
    """(power, g) pairs for mu = pairs_per_power * power along a power grid."""
    out = []
    for power in powers:
        if power <= 0:
            raise ValueError(f"power={power} must be positive")
        mu = cal.pairs_per_power * power
        rates = rates_primed(replace(p_template, mu=mu))
        out.append((float(power), effective_g(rates)))
    return out


def background_g(signal_coeff, background_coeff, power):
    """Werner parameter contributed by power-independent background light.

    Both signal pairs and accidental background coincidences scale as
    power squared, so the ratio b*P^2 / (s*P^2 + b*P^2) cancels to
    b/(s+b): identical at every excitation power.
    """
    if signal_coeff < 0 or background_coeff < 0:
        raise ValueError("coefficients must be >= 0")
    if signal_coeff + background_coeff == 0:
        raise DegenerateInputError("signal and background coefficients both zero")
    if power <= 0:
        raise ValueError(f"power={power} must be positive")
    return background_coeff / (signal_coeff + background_coeff)
