"""Gate matrices and single-qubit Euler-angle helpers.

Matrix convention: for a k-qubit gate applied to targets (t0, ..., tk-1),
bit j of the row/column index is the state of target tj.  So the CNOT
matrix below (control = t0, target = t1) swaps indices 1 and 3.
"""
from __future__ import annotations

import math
from typing import Callable, Optional, Sequence

import numpy as np

from .ir.core import K, Operation, gate_angles

SQ2 = 1 / math.sqrt(2)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * SQ2
S = np.diag([1, 1j]).astype(complex)
SDG = np.diag([1, -1j]).astype(complex)
T = np.diag([1, np.exp(1j * math.pi / 4)])
TDG = np.diag([1, np.exp(-1j * math.pi / 4)])
CNOT = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]],
    dtype=complex,
)


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def phase(lam: float) -> np.ndarray:
    return np.diag([1, np.exp(1j * lam)])


FIXED_1Q = {K.X: X, K.Y: Y, K.Z: Z, K.H: H, K.S: S, K.SDG: SDG, K.T: T, K.TDG: TDG}
ROTATION_FNS = {K.RX: rx, K.RY: ry, K.RZ: rz}


def kind_matrix(kind, angles: Sequence[float] = ()) -> np.ndarray:
    """Unitary of a named IR gate kind."""
    kind = K(kind)
    if kind in FIXED_1Q:
        return FIXED_1Q[kind]
    if kind in ROTATION_FNS:
        return ROTATION_FNS[kind](*angles)
    if kind == K.U:
        return u3(*angles)
    if kind == K.CNOT:
        return CNOT
    raise ValueError(f"{kind.value} has no fixed matrix")


def op_matrix(op: Operation) -> Optional[np.ndarray]:
    """Unitary of a gate operation, or None when an angle is not a constant."""
    if op.kind == K.GATE:
        return op.attrs["matrix"]
    angles = gate_angles(op)
    if angles is None:
        return None
    return kind_matrix(op.kind, angles)


def controlled(u: np.ndarray) -> np.ndarray:
    """Controlled-u with the control as target 0 and u acting on the remaining targets."""
    k = int(round(math.log2(u.shape[0])))
    n = k + 1
    out = np.zeros((2**n, 2**n), dtype=complex)
    for col in range(2**n):
        if col & 1 == 0:
            out[col, col] = 1
            continue
        rest = col >> 1
        for r in range(2**k):
            out[(r << 1) | 1, col] = u[r, rest]
    return out


SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def _rxx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    m = np.eye(4, dtype=complex) * c
    for i in range(4):
        m[3 - i, i] = -1j * s
    return m


def _rzz(theta: float) -> np.ndarray:
    e0, e1 = np.exp(-0.5j * theta), np.exp(0.5j * theta)
    # parity of the two bits selects the phase
    return np.diag([e0, e1, e1, e0])


SX = np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2


def _ccx() -> np.ndarray:
    return controlled(controlled(X))


def _cswap() -> np.ndarray:
    return controlled(SWAP)


# Direct matrices of the standard library gates, independent of their
# definitions in terms of U and CX.  Qubit order follows the argument order.
STANDARD_MATRICES: dict[str, Callable[..., np.ndarray]] = {
    "U": u3,
    "u3": u3,
    "u": u3,
    "u2": lambda phi, lam: u3(math.pi / 2, phi, lam),
    "u1": phase,
    "p": phase,
    "u0": lambda gamma: I2,
    "id": lambda: I2,
    "CX": lambda: CNOT,
    "cx": lambda: CNOT,
    "x": lambda: X,
    "y": lambda: Y,
    "z": lambda: Z,
    "h": lambda: H,
    "s": lambda: S,
    "sdg": lambda: SDG,
    "t": lambda: T,
    "tdg": lambda: TDG,
    "sx": lambda: SX,
    "sxdg": lambda: SX.conj().T,
    "rx": rx,
    "ry": ry,
    "rz": rz,
    "cz": lambda: controlled(Z),
    "cy": lambda: controlled(Y),
    "ch": lambda: controlled(H),
    "swap": lambda: SWAP,
    "ccx": _ccx,
    "cswap": _cswap,
    "crx": lambda t: controlled(rx(t)),
    "cry": lambda t: controlled(ry(t)),
    "crz": lambda t: controlled(rz(t)),
    "cu1": lambda lam: controlled(phase(lam)),
    "cp": lambda lam: controlled(phase(lam)),
    "cu3": lambda th, ph, la: controlled(u3(th, ph, la)),
    "csx": lambda: controlled(SX),
    "cu": lambda th, ph, la, g: controlled(np.exp(1j * g) * u3(th, ph, la)),
    "rxx": _rxx,
    "rzz": _rzz,
}


# ---------------------------------------------------------------------------
# Euler angles

GIMBAL_TOL = 1e-12


def zyz_angles(m: np.ndarray) -> tuple[float, float, float]:
    """(theta, phi, lambda) with u3(theta, phi, lambda) equal to `m` up to global phase.

    When sin(theta/2) or cos(theta/2) vanishes only phi+lambda (or phi-lambda)
    is determined; lambda is then set to 0 and the phase folded into phi.
    """
    m = np.asarray(m, dtype=complex)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    theta = 2.0 * math.atan2(abs(c), abs(a))
    cos_half, sin_half = math.cos(theta / 2), math.sin(theta / 2)
    if sin_half <= GIMBAL_TOL:
        return 0.0, float(np.angle(d * np.conj(a))), 0.0
    if cos_half <= GIMBAL_TOL:
        return math.pi, float(np.angle(c * np.conj(-b))), 0.0
    # read each angle relative to a; halving phi+lambda and phi-lambda would
    # leave both off by pi on a wrapped difference
    phi = float(np.angle(c * np.conj(a)))
    lam = float(np.angle(-b * np.conj(a)))
    return theta, phi, lam


def normalize_angle(a: float) -> float:
    """Reduce into (-pi, pi]."""
    r = math.remainder(a, 2 * math.pi)
    return math.pi if r == -math.pi else r


def angles_equal(a: float, b: float, tol: float = 1e-12) -> bool:
    return abs(normalize_angle(a - b)) <= tol


def is_identity_up_to_phase(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    k = m[0, 0]
    if abs(abs(k) - 1) > tol:
        return False
    return float(np.max(np.abs(m - k * np.eye(m.shape[0])))) <= tol


def is_diagonal(m: np.ndarray, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return float(np.max(np.abs(m - np.diag(np.diag(m))))) <= tol
