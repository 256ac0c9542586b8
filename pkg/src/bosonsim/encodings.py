"""Qubit representations of truncated boson and fermion ladder operators.

Two boson mappings are provided:

* unary — occupation ``n`` is the one-hot string with qubit ``n`` set
  (``Nb + 1`` qubits for cutoff ``Nb``);
* binary — occupation ``n`` is its binary representation, MSB first
  (``ceil(log2(Nb + 1))`` qubits).

Fermions use the Jordan-Wigner transformation with Z parity prefixes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, ParameterError
from .pauli import PauliSum, ladder, outer_1q, projector


def boson_ops_unary(Nb: int) -> dict[str, PauliSum]:
    """Truncated boson operators in the unary (one-hot) mapping.

    creation = Σ_{n=0}^{Nb-1} √(n+1) (+)_n ⊗ (−)_{n+1}, identity elsewhere,
    so that b†|n⟩ = √(n+1)|n+1⟩ on one-hot basis states.
    """
    if Nb < 1:
        raise ParameterError("unary cutoff Nb must be >= 1")
    width = Nb + 1
    creation = PauliSum.zero(width)
    for n in range(Nb):
        op = PauliSum.identity(0)
        for q in range(width):
            if q == n:
                op = op.tensor(ladder("plus"))
            elif q == n + 1:
                op = op.tensor(ladder("minus"))
            else:
                op = op.tensor(PauliSum.identity(1))
        creation = creation + math.sqrt(n + 1) * op
    annihilation = creation.adjoint()
    number = (creation * annihilation).simplify()
    return {
        "creation": creation.simplify(),
        "annihilation": annihilation.simplify(),
        "number": number,
    }


def _outer_product(row: int, col: int, width: int) -> PauliSum:
    """|row⟩⟨col| on `width` qubits, bits MSB-first, as a PauliSum."""
    op = PauliSum.identity(0)
    for q in range(width):
        rb = (row >> (width - 1 - q)) & 1
        cb = (col >> (width - 1 - q)) & 1
        op = op.tensor(outer_1q(rb, cb))
    return op


def boson_ops_binary(Nq: int) -> dict[str, PauliSum]:
    """Truncated boson operators in the binary mapping on Nq qubits.

    The register cutoff is 2^Nq − 1; creation = Σ √(n+1)|n+1⟩⟨n| with the
    occupation read MSB-first, outer products expanded qubit by qubit.
    """
    if Nq < 1:
        raise ParameterError("binary register needs Nq >= 1")
    top = 2**Nq - 1
    creation = PauliSum.zero(Nq)
    number = PauliSum.zero(Nq)
    for n in range(top):
        creation = creation + math.sqrt(n + 1) * _outer_product(n + 1, n, Nq)
    for n in range(top + 1):
        if n:
            number = number + float(n) * _outer_product(n, n, Nq)
    annihilation = creation.adjoint()
    return {
        "creation": creation.simplify(),
        "annihilation": annihilation.simplify(),
        "number": number.simplify(),
    }


def fermion_ops_jw(site_index: int, n_sites: int) -> dict[str, PauliSum]:
    """Jordan-Wigner creation/annihilation for one site of a chain.

    creation = Z^⊗site ⊗ (−) ⊗ I^⊗rest; |1⟩ marks an occupied site.
    """
    if not 0 <= site_index < n_sites:
        raise ParameterError(
            f"site_index {site_index} out of range for {n_sites} sites"
        )
    op = PauliSum.identity(0)
    for q in range(n_sites):
        if q < site_index:
            op = op.tensor(PauliSum.from_term("Z"))
        elif q == site_index:
            op = op.tensor(ladder("minus"))
        else:
            op = op.tensor(PauliSum.identity(1))
    return {"creation": op, "annihilation": op.adjoint()}


# ---------------------------------------------------------------------------
# Register layouts
# ---------------------------------------------------------------------------

_KINDS = ("spin", "fermion", "boson")


@dataclass(frozen=True)
class Register:
    kind: str
    encoding: str | None  # unary|binary for bosons, None otherwise
    cutoff: int  # logical cutoff for bosons; 1 for spin/fermion
    offset: int  # first qubit index
    width: int  # number of qubits

    @property
    def fock_dim(self) -> int:
        if self.kind == "boson":
            return self.cutoff + 1
        return 2

    def basis_index(self, occupation: int) -> int:
        """Qubit-register basis index encoding the given occupation."""
        if not 0 <= occupation < self.fock_dim:
            raise ParameterError(f"occupation {occupation} out of range")
        if self.kind == "boson" and self.encoding == "unary":
            return 1 << (self.width - 1 - occupation)
        return occupation


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered registers with disjoint, contiguous qubit ranges."""

    registers: tuple[Register, ...] = field(default_factory=tuple)

    @staticmethod
    def build(specs: list[dict]) -> "RegisterLayout":
        """Assign qubits deterministically from ordered {kind, encoding, cutoff}."""
        regs = []
        offset = 0
        for spec in specs:
            kind = spec["kind"]
            if kind not in _KINDS:
                raise ParameterError(f"unknown register kind {kind!r}")
            if kind == "boson":
                encoding = spec.get("encoding", "binary")
                cutoff = int(spec["cutoff"])
                if cutoff < 1:
                    raise ParameterError("boson cutoff must be >= 1")
                if encoding == "unary":
                    width = cutoff + 1
                elif encoding == "binary":
                    width = max(1, math.ceil(math.log2(cutoff + 1)))
                    # full binary register: round the cutoff up
                    cutoff = 2**width - 1 if spec.get("round_up", True) else cutoff
                else:
                    raise ParameterError(f"unknown encoding {encoding!r}")
            else:
                encoding, cutoff, width = None, 1, 1
            regs.append(Register(kind, encoding, cutoff, offset, width))
            offset += width
        return RegisterLayout(tuple(regs))

    @property
    def total_qubits(self) -> int:
        return sum(r.width for r in self.registers)

    @property
    def fock_dims(self) -> tuple[int, ...]:
        return tuple(r.fock_dim for r in self.registers)

    def to_descriptor(self) -> list[dict]:
        return [
            {"kind": r.kind, "encoding": r.encoding, "cutoff": r.cutoff,
             "offset": r.offset, "width": r.width}
            for r in self.registers
        ]

    def isometry(self) -> np.ndarray:
        """Map Fock tensor basis into the qubit space (columns orthonormal).

        Column index runs over the tensor product of per-register Fock
        dimensions (first register slowest); rows over the 2^n qubit basis.
        """
        nq = self.total_qubits
        dims = self.fock_dims
        d_fock = int(np.prod(dims))
        V = np.zeros((2**nq, d_fock), dtype=complex)
        for col in range(d_fock):
            rem, occs = col, []
            for d in reversed(dims):
                occs.append(rem % d)
                rem //= d
            occs.reverse()
            row = 0
            for reg, occ in zip(self.registers, occs):
                row = (row << reg.width) | reg.basis_index(occ)
            V[row, col] = 1.0
        return V


def embed(local_op: PauliSum, layout: RegisterLayout, register_id: int) -> PauliSum:
    """Place a register-local operator into the full layout, identity elsewhere."""
    reg = layout.registers[register_id]
    if local_op.qubit_count != reg.width:
        raise DimensionError(
            f"operator has {local_op.qubit_count} qubits, register {register_id} "
            f"has width {reg.width}"
        )
    left = PauliSum.identity(reg.offset)
    right = PauliSum.identity(layout.total_qubits - reg.offset - reg.width)
    return left.tensor(local_op).tensor(right)


# ---------------------------------------------------------------------------
# Normal modes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalModeDecomposition:
    frequencies: np.ndarray  # ω_j >= 0
    unitary: np.ndarray  # columns are normal-mode vectors
    convention: str = "mass-scaled coordinates q_j = sqrt(M_j) Q_j, hbar = 1"

    def reconstruct(self) -> np.ndarray:
        return self.unitary @ np.diag(self.frequencies**2) @ self.unitary.conj().T


def normal_modes(V: np.ndarray, masses) -> NormalModeDecomposition:
    """Diagonalize the mass-scaled force-constant matrix v_jk = V_jk/√(M_j M_k)."""
    V = np.asarray(V, dtype=float)
    masses = np.asarray(masses, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise DimensionError("V must be square")
    if masses.shape != (V.shape[0],):
        raise DimensionError("one mass per coordinate required")
    if np.any(masses <= 0):
        raise ParameterError("masses must be positive")
    if np.max(np.abs(V - V.T)) > 1e-10:
        raise DomainError("V must be symmetric within 1e-10")
    scale = 1.0 / np.sqrt(masses)
    v = V * np.outer(scale, scale)
    evals, U = np.linalg.eigh(v)
    if np.min(evals) < -1e-8:
        raise DomainError("v is not positive semidefinite")
    evals = np.clip(evals, 0.0, None)
    return NormalModeDecomposition(np.sqrt(evals), U)
