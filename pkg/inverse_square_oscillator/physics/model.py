"""
Physical parameters, derived exponents and U(2) boundary data.

The Hamiltonian is H = p^2/2m + m omega^2 x^2/2 + g/x^2 on the punctured line.
Every self-adjoint realization is labelled by a characteristic matrix U in U(2)
entering the Wronskian boundary condition (U - I) Psi + i L0 (U + I) Psi' = 0.
"""
import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from inverse_square_oscillator.utils.exceptions import ParameterError
from inverse_square_oscillator.utils.logger import logger

UNITARY_TOL = 1e-12
PHASE_TOL = 1e-12
DEGENERACY_TOL = 1e-10

# Named characteristic matrices accepted by configuration files.
NAMED_UNITARIES = {
    "identity": np.eye(2, dtype=complex),
    "minus_identity": -np.eye(2, dtype=complex),
    "sigma1": np.array([[0, 1], [1, 0]], dtype=complex),
}


@dataclass(frozen=True)
class PhysicalParams:
    """Mass, angular frequency, Planck constant and inverse-square coupling."""
    m: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    g: float = 5.0 / 32.0

    def __post_init__(self):
        for name in ("m", "omega", "hbar"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be strictly positive, got {value}")
        if not math.isfinite(self.g):
            raise ParameterError(f"g must be finite, got {self.g}")

    @property
    def kappa(self) -> float:
        """Inverse oscillator length sqrt(m omega / hbar); y = kappa * x."""
        return math.sqrt(self.m * self.omega / self.hbar)

    @property
    def length_scale(self) -> float:
        """Oscillator length sqrt(hbar / (m omega))."""
        return 1.0 / self.kappa

    @property
    def coupling_limit(self) -> float:
        """Upper end 3 hbar^2 / (8 m) of the tunneling window."""
        return 3.0 * self.hbar ** 2 / (8.0 * self.m)

    def energy(self, lam: float) -> float:
        """Energy E = lambda * hbar * omega of a dimensionless eigenvalue."""
        return lam * self.hbar * self.omega


@dataclass(frozen=True)
class Exponents:
    """Dimensionless exponents a, c1 = 1 + a, c2 = 1 - a."""
    a: float
    c1: float
    c2: float

    def c(self, kind: int) -> float:
        """Return c1 for kind 1 and c2 for kind 2."""
        if kind == 1:
            return self.c1
        if kind == 2:
            return self.c2
        raise ParameterError(f"solution kind must be 1 or 2, got {kind}")


def exponents_from_coupling(params: PhysicalParams, limit_test: bool = False) -> Exponents:
    """
    Derive a = sqrt(1 + 8 m g / hbar^2) / 2 and c1, c2 from the coupling.

    Args:
        params (PhysicalParams): Physical parameters
        limit_test (bool): Admit the closed window 0 <= g <= 3 hbar^2 / 8m used
            by the harmonic-oscillator and a -> 1 limit checks

    Returns:
        Exponents: a, c1, c2

    Raises:
        ParameterError: If g lies outside the admissible window
    """
    g_max = params.coupling_limit
    if limit_test:
        admissible = 0.0 <= params.g <= g_max
    else:
        admissible = 0.0 < params.g < g_max
    if not admissible:
        window = f"[0, {g_max}]" if limit_test else f"(0, {g_max})"
        raise ParameterError(f"coupling g = {params.g} outside the admissible window {window}")

    a = 0.5 * math.sqrt(1.0 + 8.0 * params.m * params.g / params.hbar ** 2)
    return Exponents(a=a, c1=1.0 + a, c2=1.0 - a)


def coupling_from_exponent(a: float, m: float = 1.0, hbar: float = 1.0) -> float:
    """Inverse of exponents_from_coupling: g = hbar^2 (4 a^2 - 1) / (8 m)."""
    return hbar ** 2 * (4.0 * a * a - 1.0) / (8.0 * m)


def unitarity_defect(U: np.ndarray) -> float:
    """Max-norm of U^dagger U - I."""
    U = np.asarray(U, dtype=complex)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def extension_length(theta: float, L0: float) -> float:
    """L = L0 cot(theta / 2), exactly inf at theta = 0 and 0 at theta = pi."""
    if theta == 0.0:
        return math.inf
    if theta == math.pi:
        return 0.0
    return L0 / math.tan(0.5 * theta)


def _snap_phase(theta: float) -> float:
    """Reduce to [0, 2 pi) and snap values near 0 or pi onto them exactly."""
    theta = math.fmod(theta, 2.0 * math.pi)
    if theta < 0:
        theta += 2.0 * math.pi
    if theta < PHASE_TOL or 2.0 * math.pi - theta < PHASE_TOL:
        return 0.0
    if abs(theta - math.pi) < PHASE_TOL:
        return math.pi
    return theta


@dataclass(frozen=True)
class BoundaryData:
    """Characteristic matrix U = V^-1 diag(e^{i theta+}, e^{i theta-}) V with extension lengths."""
    U: np.ndarray
    theta_plus: float
    theta_minus: float
    V: np.ndarray
    L0: float
    L_plus: float
    L_minus: float

    @property
    def degenerate(self) -> bool:
        return self.theta_plus == self.theta_minus

    @property
    def is_diagonal(self) -> bool:
        return abs(self.U[0, 1]) < UNITARY_TOL and abs(self.U[1, 0]) < UNITARY_TOL

    def length(self, branch: str) -> float:
        """Extension length of the 'plus' or 'minus' branch."""
        if branch == "plus":
            return self.L_plus
        if branch == "minus":
            return self.L_minus
        raise ParameterError(f"branch must be 'plus' or 'minus', got {branch!r}")

    def eigenvector(self, branch: str) -> np.ndarray:
        """Column of V^-1 belonging to the branch eigenphase."""
        columns = {"plus": 0, "minus": 1}
        if branch not in columns:
            raise ParameterError(f"branch must be 'plus' or 'minus', got {branch!r}")
        return self.V.conj().T[:, columns[branch]]

    def recompose(self) -> np.ndarray:
        """V^-1 diag(e^{i theta+}, e^{i theta-}) V."""
        D = np.diag([np.exp(1j * self.theta_plus), np.exp(1j * self.theta_minus)])
        return np.linalg.inv(self.V) @ D @ self.V


def decompose_unitary(U: Any, L0: float = 1.0) -> BoundaryData:
    """
    Decompose a characteristic matrix into eigenphases and a special-unitary V.

    theta+ belongs to the eigenvector with the larger first-component
    magnitude; on a tie the smaller phase comes first. A degenerate U
    returns V = I.

    Args:
        U: 2x2 unitary matrix
        L0 (float): Length scale of the boundary condition

    Returns:
        BoundaryData: Eigen-decomposition and extension lengths

    Raises:
        ParameterError: If U is not 2x2 unitary or L0 is not positive
    """
    U = np.array(U, dtype=complex)
    if U.shape != (2, 2):
        raise ParameterError(f"characteristic matrix must be 2x2, got shape {U.shape}")
    if not L0 > 0 or not math.isfinite(L0):
        raise ParameterError(f"L0 must be a positive length, got {L0}")
    defect = unitarity_defect(U)
    if defect > UNITARY_TOL:
        raise ParameterError(f"characteristic matrix is not unitary: ||U^dagger U - I|| = {defect:.3e}")

    eigvals, eigvecs = np.linalg.eig(U)
    if abs(eigvals[0] - eigvals[1]) <= DEGENERACY_TOL:
        theta = _snap_phase(float(np.angle(0.5 * (eigvals[0] + eigvals[1]))))
        V = np.eye(2, dtype=complex)
        theta_plus = theta_minus = theta
    else:
        eigvecs = eigvecs / np.linalg.norm(eigvecs, axis=0)
        phases = [_snap_phase(float(np.angle(v))) for v in eigvals]
        first = np.abs(eigvecs[0, :])
        if abs(first[0] - first[1]) <= UNITARY_TOL:
            plus = 0 if phases[0] <= phases[1] else 1
        else:
            plus = int(np.argmax(first))
        u = eigvecs[:, plus]
        pivot = u[0] if abs(u[0]) > UNITARY_TOL else u[1]
        u = u * (abs(pivot) / pivot)
        # Columns (u, J u*) span SU(2): the determinant is |u|^2 = 1.
        W = np.array([[u[0], -np.conj(u[1])], [u[1], np.conj(u[0])]])
        V = W.conj().T
        D = V @ U @ W
        theta_plus = _snap_phase(float(np.angle(D[0, 0])))
        theta_minus = _snap_phase(float(np.angle(D[1, 1])))

    data = BoundaryData(
        U=U,
        theta_plus=theta_plus,
        theta_minus=theta_minus,
        V=V,
        L0=L0,
        L_plus=extension_length(theta_plus, L0),
        L_minus=extension_length(theta_minus, L0),
    )
    logger.debug(f"Decomposed U: theta+ = {theta_plus}, theta- = {theta_minus}, "
                 f"L+ = {data.L_plus}, L- = {data.L_minus}")
    return data


def unitary_from_spec(spec: Any) -> np.ndarray:
    """
    Build a characteristic matrix from its configuration form.

    Args:
        spec: A keyword ('identity', 'minus_identity', 'sigma1', 'diag:t+,t-')
            or four [re, im] pairs in row-major order

    Returns:
        np.ndarray: The 2x2 complex matrix

    Raises:
        ParameterError: If the form is not recognized
    """
    if isinstance(spec, str):
        key = spec.strip()
        if key in NAMED_UNITARIES:
            return NAMED_UNITARIES[key].copy()
        if key.startswith("diag:"):
            try:
                theta_plus, theta_minus = (float(part) for part in key[5:].split(","))
            except ValueError as e:
                raise ParameterError(f"malformed diagonal characteristic matrix {spec!r}") from e
            return np.diag([np.exp(1j * theta_plus), np.exp(1j * theta_minus)])
        raise ParameterError(f"unknown characteristic matrix keyword {spec!r}")

    entries: Sequence = list(spec)
    if len(entries) != 4:
        raise ParameterError(f"characteristic matrix needs four [re, im] entries, got {len(entries)}")
    try:
        values = [complex(float(re), float(im)) for re, im in entries]
    except (TypeError, ValueError) as e:
        raise ParameterError(f"malformed characteristic matrix entries {spec!r}") from e
    return np.array(values, dtype=complex).reshape(2, 2)


def supports_tunneling(bd: BoundaryData, params: PhysicalParams) -> bool:
    """
    Whether probability can flow through x = 0.

    Requires the coupling inside the open window and a non-diagonal U; a
    diagonal U decouples the half lines.
    """
    return 0.0 < params.g < params.coupling_limit and not bd.is_diagonal


def boundary_residual(bd: BoundaryData, psi: np.ndarray, psi_prime: np.ndarray) -> float:
    """Norm of (U - I) Psi + i L0 (U + I) Psi' for a pair of boundary vectors."""
    identity = np.eye(2)
    residual = (bd.U - identity) @ psi + 1j * bd.L0 * (bd.U + identity) @ psi_prime
    return float(np.linalg.norm(residual))
