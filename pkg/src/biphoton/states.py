"""Two-photon polarization density matrices and their metrics.

The fixed basis order is |HH>, |HV>, |VH>, |VV> everywhere in this package.
States are plain 4x4 complex numpy arrays; pure states are length-4 complex
vectors in the same basis.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParseError, ValidationError

BASIS_LABELS = ("HH", "HV", "VH", "VV")

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10  # slack for reconstruction round-off; exact constructors hit >= 0

_SY = np.array([[0, -1j], [1j, 0]])
_SYSY = np.kron(_SY, _SY)


def bell_state():
    """(|HH> + |VV>)/sqrt(2), the ideal entangled-pair vector."""
    return np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


def ideal_bell():
    """Rank-1 projector onto bell_state(): 1/2 at the four corners."""
    psi = bell_state()
    return np.outer(psi, psi.conj())


def totally_mixed():
    """I/4, the maximally mixed two-qubit state."""
    return np.eye(4, dtype=complex) / 4


def werner(g):
    """Mixture (1-g)*ideal + g*I/4 for mixing parameter g in [0, 1]."""
    if not 0 <= g <= 1:
        raise ValueError(f"mixing parameter g={g} outside [0, 1]")
    return (1 - g) * ideal_bell() + g * totally_mixed()


@dataclass(frozen=True)
class Diagnostics:
    """Physicality report for a candidate density matrix."""

    hermiticity_error: float
    trace_error: float
    min_eigenvalue: float

    @property
    def ok(self):
        return (
            self.hermiticity_error <= HERMITICITY_TOL
            and self.trace_error <= TRACE_TOL
            and self.min_eigenvalue >= -PSD_TOL
        )

    def failures(self):
        """Names of the violated invariants, in a fixed order."""
        out = []
        if self.hermiticity_error > HERMITICITY_TOL:
            out.append("hermiticity")
        if self.trace_error > TRACE_TOL:
            out.append("trace")
        if self.min_eigenvalue < -PSD_TOL:
            out.append("positivity")
        return out


def validate(rho):
    """Diagnose Hermiticity, trace and positivity of a 4x4 array.

    Returns a Diagnostics record; never raises.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected 4x4 array, got shape {rho.shape}")
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace = float(abs(np.trace(rho) - 1))
    herm_part = (rho + rho.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(herm_part)[0])
    return Diagnostics(herm, trace, min_eig)


def require_valid(rho):
    diag = validate(rho)
    if not diag.ok:
        raise ValidationError(
            f"invalid density matrix: {', '.join(diag.failures())} "
            f"(herm={diag.hermiticity_error:.3g}, trace_dev={diag.trace_error:.3g}, "
            f"min_eig={diag.min_eigenvalue:.3g})"
        )
    return rho


def fidelity(rho, psi):
    """Overlap <psi|rho|psi> of a state with a pure target, in [0, 1]."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-12:
        raise ValidationError("target state is not unit-norm")
    require_valid(rho)
    val = psi.conj() @ np.asarray(rho, dtype=complex) @ psi
    assert abs(val.imag) < 1e-12
    return float(val.real)


def purity(rho):
    """Tr(rho^2), in [1/4, 1] for a valid two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)


def linear_entropy(rho):
    """Normalized mixedness (4/3)(1 - Tr rho^2): 0 pure, 1 maximally mixed."""
    return (4.0 / 3.0) * (1.0 - purity(rho))


def _sqrtm_psd(rho):
    w, v = np.linalg.eigh(rho)
    w = np.clip(w, 0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence(rho):
    """Wootters concurrence max(0, l1 - l2 - l3 - l4).

    The lk are the decreasing square roots of the eigenvalues of
    rho (sy x sy) rho* (sy x sy); computed through the equivalent Hermitian
    form sqrt(rho) (sy x sy) rho* (sy x sy) sqrt(rho) so the spectrum is
    real and non-negative up to round-off.
    """
    rho = np.asarray(rho, dtype=complex)
    root = _sqrtm_psd(rho)
    rho_tilde = _SYSY @ rho.conj() @ _SYSY
    m = root @ rho_tilde @ root
    ev = np.linalg.eigvalsh((m + m.conj().T) / 2)
    lam = np.sqrt(np.clip(ev, 0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def tangle(rho):
    """Square of the concurrence."""
    c = concurrence(rho)
    return c * c


def werner_fit(rho):
    """Mixing parameter g minimizing the Frobenius distance to the
    one-parameter family (1-g)*ideal + g*I/4.

    Closed form: the least-squares projection onto the segment, clamped
    to [0, 1].
    """
    rho = np.asarray(rho, dtype=complex)
    direction = totally_mixed() - ideal_bell()
    diff = rho - ideal_bell()
    num = float(np.trace(direction.conj().T @ diff).real)
    den = float(np.trace(direction.conj().T @ direction).real)
    return float(np.clip(num / den, 0.0, 1.0))


@dataclass(frozen=True)
class StateMetrics:
    """The scalar summary computed for every analyzed state."""

    fidelity: float
    tangle: float
    linear_entropy: float
    purity: float
    werner_g: float


def compute_metrics(rho):
    """All metrics of a state against the ideal entangled-pair target."""
    return StateMetrics(
        fidelity=fidelity(rho, bell_state()),
        tangle=tangle(rho),
        linear_entropy=linear_entropy(rho),
        purity=purity(rho),
        werner_g=werner_fit(rho),
    )


# --- plain-text serialization -------------------------------------------------
# 4 lines x 4 whitespace-separated complex entries "a+bi"; the parser also
# accepts "(a,b)" pairs and bare reals.


def _format_entry(z):
    return f"{z.real:.17g}{z.imag:+.17g}i"


def format_density_matrix(rho):
    rho = np.asarray(rho, dtype=complex)
    return "\n".join(" ".join(_format_entry(z) for z in row) for row in rho) + "\n"


def _parse_entry(token):
    token = token.strip()
    try:
        if token.startswith("(") and token.endswith(")"):
            re_s, im_s = token[1:-1].split(",")
            return complex(float(re_s), float(im_s))
        return complex(token.replace("i", "j"))
    except ValueError as exc:
        raise ParseError(f"bad matrix entry {token!r}") from exc


def parse_density_matrix(text):
    """Parse the 4x4 plain-text matrix format; '#' lines are comments."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 4:
            raise ParseError(f"expected 4 entries per row, got {len(tokens)}")
        rows.append([_parse_entry(t) for t in tokens])
    if len(rows) != 4:
        raise ParseError(f"expected 4 matrix rows, got {len(rows)}")
    return np.array(rows, dtype=complex)
