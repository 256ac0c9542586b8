"""Model Hamiltonian builders: Bose-Hubbard, spin-boson, and Holstein.

Each builder produces an :class:`EncodedHamiltonian` carrying the
Pauli-compiled operator, its register layout, and an independent
Fock-space matrix assembled directly from occupation-number rules.  The
two forms must agree under the layout's basis identification — that
equivalence is the module's master invariant and is exercised by the
test suite at every dense-testable size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encodings import (
    RegisterLayout,
    boson_ops_binary,
    boson_ops_unary,
    embed,
    fermion_ops_jw,
)
from .errors import ConditionViolation, DimensionError, ParameterError
from .pauli import PauliSum

# ---------------------------------------------------------------------------
# Parameter records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoseHubbardParams:
    n_sites: int
    t: float = 0.0
    U: float = 0.0
    V: float = 0.0
    mu: float | tuple = 0.0
    Nb: int = 1

    def mu_list(self) -> list[float]:
        if np.isscalar(self.mu):
            return [float(self.mu)] * self.n_sites
        mus = list(self.mu)
        if len(mus) != self.n_sites:
            raise ParameterError("per-site mu must have n_sites entries")
        return [float(m) for m in mus]

    def __post_init__(self):
        if self.n_sites < 1 or self.Nb < 1:
            raise ParameterError("need n_sites >= 1 and Nb >= 1")


@dataclass(frozen=True)
class SpinBosonParams:
    delta: float
    epsilon: float
    omegas: tuple
    couplings: tuple
    cutoffs: tuple

    def __post_init__(self):
        if not (len(self.omegas) == len(self.couplings) == len(self.cutoffs)):
            raise ParameterError("omegas, couplings, cutoffs must align")
        if any(c < 1 for c in self.cutoffs):
            raise ParameterError("cutoffs must be >= 1")


@dataclass(frozen=True)
class HolsteinParams:
    n_sites: int
    v: float = 1.0
    omega: float = 1.0
    g: float = 0.0
    Nb: int = 1
    boundary: str = "periodic"

    def __post_init__(self):
        if self.n_sites < 2:
            raise ParameterError("Holstein chain needs n_sites >= 2")
        if self.boundary not in ("periodic", "open"):
            raise ParameterError("boundary must be 'periodic' or 'open'")


@dataclass(frozen=True)
class EncodedHamiltonian:
    pauli: PauliSum
    layout: RegisterLayout
    fock: np.ndarray
    kind: str
    params: object = None

    @property
    def fock_dims(self) -> tuple[int, ...]:
        return self.layout.fock_dims

    def pauli_matrix(self, dense_limit: int = 14) -> np.ndarray:
        return self.pauli.to_matrix(dense_limit)

    def identification_defect(self) -> float:
        """Max deviation between the two forms on the encoded subspace."""
        V = self.layout.isometry()
        return float(np.max(np.abs(V.conj().T @ self.pauli_matrix() @ V - self.fock)))


# ---------------------------------------------------------------------------
# Fock-space building blocks (oracle path, no Pauli algebra involved)
# ---------------------------------------------------------------------------


def mode_matrices(cutoff: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(annihilation, creation, number) for one truncated mode."""
    d = cutoff + 1
    b = np.diag(np.sqrt(np.arange(1.0, d)), 1)
    return b, b.conj().T, np.diag(np.arange(float(d)))


def embed_fock(op: np.ndarray, dims, index: int) -> np.ndarray:
    """Kronecker-embed a single-factor operator into a tensor-product space."""
    out = np.eye(1, dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, op if i == index else np.eye(d))
    return out


def fermion_fock_ops(n_sites: int) -> list[np.ndarray]:
    """Creation matrices on the 2^n fermionic Fock space (site 0 = MSB).

    Signs follow the occupation-ordering convention (−1)^{Σ_{j<i} n_j},
    the same ordering realized by the Jordan-Wigner Z strings.
    """
    dim = 2**n_sites
    ops = []
    for site in range(n_sites):
        m = np.zeros((dim, dim))
        bit = 1 << (n_sites - 1 - site)
        for col in range(dim):
            if col & bit:
                continue
            parity = bin(col >> (n_sites - site)).count("1")
            m[col | bit, col] = (-1.0) ** parity
        ops.append(m)
    return ops


def boson_site_ops(dims) -> list[np.ndarray]:
    """Embedded annihilation matrices for each mode of a tensor Fock space."""
    return [
        embed_fock(mode_matrices(d - 1)[0], dims, i) for i, d in enumerate(dims)
    ]


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def _boson_pauli_ops(encoding: str, width_cutoff: int):
    if encoding == "unary":
        return boson_ops_unary(width_cutoff)
    if encoding == "binary":
        nq = max(1, math.ceil(math.log2(width_cutoff + 1)))
        return boson_ops_binary(nq)
    raise ParameterError(f"unknown encoding {encoding!r}")


def build_bose_hubbard(p: BoseHubbardParams, encoding: str = "binary") -> EncodedHamiltonian:
    """General Bose-Hubbard Hamiltonian over all site pairs j > i.

    H = Σ_i [−μ_i n̂_i + (U/2) n̂_i(n̂_i − 1)] − t Σ_{j>i} (b†_i b_j + h.c.)
        + V Σ_{j>i} n̂_i n̂_j
    """
    layout = RegisterLayout.build(
        [{"kind": "boson", "encoding": encoding, "cutoff": p.Nb}] * p.n_sites
    )
    mus = p.mu_list()
    nq = layout.total_qubits
    local = _boson_pauli_ops(encoding, p.Nb)
    create = [embed(local["creation"], layout, i) for i in range(p.n_sites)]
    annih = [embed(local["annihilation"], layout, i) for i in range(p.n_sites)]
    number = [embed(local["number"], layout, i) for i in range(p.n_sites)]

    H = PauliSum.zero(nq)
    for i in range(p.n_sites):
        H = H + (-mus[i]) * number[i]
        if p.U:
            H = H + (0.5 * p.U) * (number[i] * number[i] - number[i])
    for i in range(p.n_sites):
        for j in range(i + 1, p.n_sites):
            if p.t:
                H = H + (-p.t) * (create[i] * annih[j] + create[j] * annih[i])
            if p.V:
                H = H + p.V * (number[i] * number[j])
    H = H.simplify()

    dims = layout.fock_dims
    Hf = np.zeros((int(np.prod(dims)), int(np.prod(dims))), dtype=complex)
    bs = boson_site_ops(dims)
    for i in range(p.n_sites):
        n_i = bs[i].conj().T @ bs[i]
        Hf += -mus[i] * n_i + 0.5 * p.U * (n_i @ n_i - n_i)
        for j in range(i + 1, p.n_sites):
            n_j = bs[j].conj().T @ bs[j]
            Hf += -p.t * (bs[i].conj().T @ bs[j] + bs[j].conj().T @ bs[i])
            Hf += p.V * (n_i @ n_j)
    return EncodedHamiltonian(H, layout, Hf, "bose_hubbard", p)


def build_spin_boson(p: SpinBosonParams, encoding: str = "binary") -> EncodedHamiltonian:
    """Two-level system coupled linearly to harmonic modes.

    H = Δ X + (ε/2) Z + Σ_i ω_i n̂_i + (X/2) Σ_i g_i ω_i (b†_i + b_i)
    """
    specs = [{"kind": "spin"}] + [
        {"kind": "boson", "encoding": encoding, "cutoff": c} for c in p.cutoffs
    ]
    layout = RegisterLayout.build(specs)
    nq = layout.total_qubits
    X = embed(PauliSum.from_term("X"), layout, 0)
    Z = embed(PauliSum.from_term("Z"), layout, 0)
    H = p.delta * X + (0.5 * p.epsilon) * Z
    for m, (w, g, c) in enumerate(zip(p.omegas, p.couplings, p.cutoffs)):
        local = _boson_pauli_ops(encoding, c)
        nm = embed(local["number"], layout, m + 1)
        xm = embed(local["creation"] + local["annihilation"], layout, m + 1)
        H = H + w * nm + (0.5 * g * w) * (X * xm)
    H = H.simplify()

    dims = layout.fock_dims
    D = int(np.prod(dims))
    Xf = embed_fock(np.array([[0, 1], [1, 0]], dtype=complex), dims, 0)
    Zf = embed_fock(np.diag([1.0, -1.0]).astype(complex), dims, 0)
    Hf = p.delta * Xf + 0.5 * p.epsilon * Zf
    for m, (w, g) in enumerate(zip(p.omegas, p.couplings)):
        bm, bdm, nm = mode_matrices(dims[m + 1] - 1)
        Hf += w * embed_fock(nm, dims, m + 1)
        Hf += 0.5 * g * w * Xf @ embed_fock(bm + bdm, dims, m + 1)
    return EncodedHamiltonian(H, layout, Hf, "spin_boson", p)


def holstein_pairs(p: HolsteinParams) -> list[tuple[int, int]]:
    pairs = [(i, i + 1) for i in range(p.n_sites - 1)]
    if p.boundary == "periodic" and p.n_sites > 2:
        pairs.append((p.n_sites - 1, 0))
    return pairs


def build_holstein(p: HolsteinParams, encoding: str = "binary") -> EncodedHamiltonian:
    """1-D Holstein chain: fermion registers first, then boson registers.

    H = −v Σ_⟨i,j⟩ (f†_i f_j + f†_j f_i) + ω Σ_i n̂_i + gω Σ_i f†_i f_i (b†_i + b_i)
    """
    specs = [{"kind": "fermion"}] * p.n_sites + [
        {"kind": "boson", "encoding": encoding, "cutoff": p.Nb}
    ] * p.n_sites
    layout = RegisterLayout.build(specs)
    nq = layout.total_qubits
    pairs = holstein_pairs(p)

    fml = [fermion_ops_jw(i, p.n_sites) for i in range(p.n_sites)]
    pad = PauliSum.identity(nq - p.n_sites)
    fc = [ops["creation"].tensor(pad) for ops in fml]
    fa = [ops["annihilation"].tensor(pad) for ops in fml]
    local = _boson_pauli_ops(encoding, p.Nb)

    H = PauliSum.zero(nq)
    for i, j in pairs:
        H = H + (-p.v) * (fc[i] * fa[j] + fc[j] * fa[i])
    for i in range(p.n_sites):
        nb = embed(local["number"], layout, p.n_sites + i)
        xb = embed(local["creation"] + local["annihilation"], layout, p.n_sites + i)
        H = H + p.omega * nb + (p.g * p.omega) * (fc[i] * fa[i] * xb)
    H = H.simplify()

    dims = layout.fock_dims
    D = int(np.prod(dims))
    fermi_dim = 2**p.n_sites
    boson_dims = dims[p.n_sites:]
    fops = fermion_fock_ops(p.n_sites)
    boson_space = int(np.prod(boson_dims))
    Hf = np.zeros((D, D), dtype=complex)

    def lift_f(m):
        return np.kron(m, np.eye(boson_space))

    def lift_b(m, i):
        return np.kron(np.eye(fermi_dim), embed_fock(m, boson_dims, i))

    for i, j in pairs:
        Hf += -p.v * lift_f(fops[i] @ fops[j].conj().T + fops[j] @ fops[i].conj().T)
    for i in range(p.n_sites):
        b, bd, n = mode_matrices(boson_dims[i] - 1)
        Hf += p.omega * lift_b(n, i)
        Hf += p.g * p.omega * lift_f(fops[i] @ fops[i].conj().T) @ lift_b(b + bd, i)
    return EncodedHamiltonian(H, layout, Hf, "holstein", p)


# ---------------------------------------------------------------------------
# Occupation-resolved split and walk observables
# ---------------------------------------------------------------------------


def mode_occupations(model: EncodedHamiltonian, mode_index: int) -> np.ndarray:
    """Occupation of one boson register for every Fock tensor basis index."""
    bosons = [k for k, r in enumerate(model.layout.registers) if r.kind == "boson"]
    if not bosons:
        raise ParameterError("model has no boson register")
    if not 0 <= mode_index < len(bosons):
        raise ParameterError(f"mode_index {mode_index} out of range")
    reg_idx = bosons[mode_index]
    dims = model.fock_dims
    D = int(np.prod(dims))
    occ = np.zeros(D, dtype=int)
    stride = int(np.prod(dims[reg_idx + 1:])) if reg_idx + 1 < len(dims) else 1
    for idx in range(D):
        occ[idx] = (idx // stride) % dims[reg_idx]
    return occ


def hw_hr_split(model: EncodedHamiltonian, mode_index: int = 0):
    """Split H = H_w + H_r relative to one mode's occupation ladder.

    H_w collects the blocks that change the occupation by exactly ±1 and
    H_r the occupation-conserving blocks.  Returns (H_w, H_r, χ, r) with
    r = ½; χ is the model's analytic weight-growth constant where known
    (2gω for Holstein, gω per mode for spin-boson) and a numerical fit
    otherwise.
    """
    occ = mode_occupations(model, mode_index)
    H = model.fock
    diff = occ[:, None] - occ[None, :]
    Hw = np.where(np.abs(diff) == 1, H, 0.0)
    Hr = np.where(diff == 0, H, 0.0)
    residual = np.max(np.abs(H - Hw - Hr))
    if residual > 1e-10:
        bad = np.unravel_index(np.argmax(np.abs(H - Hw - Hr)), H.shape)
        raise ConditionViolation(
            "Hamiltonian couples occupations differing by more than 1",
            offending=(int(occ[bad[0]]), int(occ[bad[1]])),
        )
    p = model.params
    if model.kind == "holstein":
        chi = 2.0 * p.g * p.omega
    elif model.kind == "spin_boson":
        chi = abs(p.couplings[mode_index] * p.omegas[mode_index])
    else:
        chi = 0.0
        for lam in range(int(occ.max())):
            mask = occ <= lam
            norm = np.linalg.norm(Hw[:, mask], 2)
            chi = max(chi, norm / math.sqrt(lam + 1))
    return Hw, Hr, chi, 0.5


def walk_observables(psi: np.ndarray, annihilators: list[np.ndarray]):
    """Two-walker correlation Γ_pq = ⟨b†_p b†_q b_q b_p⟩ and densities ⟨n̂_p⟩."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ParameterError("state must be normalized")
    n = len(annihilators)
    gamma = np.zeros((n, n))
    dens = np.zeros(n)
    for p in range(n):
        bp_psi = annihilators[p] @ psi
        dens[p] = float(np.real(np.vdot(bp_psi, bp_psi)))
        for q in range(n):
            v = annihilators[q] @ bp_psi
            gamma[p, q] = float(np.real(np.vdot(v, v)))
    return gamma, dens
