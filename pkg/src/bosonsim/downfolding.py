"""Bosonic coupled-cluster downfolding machinery.

Works in the fixed-particle-number Fock space of N bosons in M modes
(dimension C(M+N−1, N)).  Provides CC amplitude equations, the
similarity-transformed effective Hamiltonian, the moments-based energy
functional, and the five-rotation disentangled ansatz for the 3-level
2-boson model with its reverse-flow parameter extraction and the nested
macro/micro optimization loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize, root

from .errors import ConvergenceError, DimensionError, DomainError, ParameterError


def fci_dims(M: int, N: int) -> int:
    """Dimension of the N-boson, M-mode Fock space: C(M+N−1, N)."""
    if M < 1 or N < 1:
        raise ParameterError("need M >= 1 and N >= 1")
    return math.comb(M + N - 1, N)


def act_dims(M_act: int, N: int) -> int:
    """Active-space dimension C(M_act + N − 1, N)."""
    return fci_dims(M_act, N)


class BosonFockSpace:
    """Fixed-N occupation basis for M modes, ordered descending."""

    def __init__(self, M: int, N: int):
        if M < 1 or N < 0:
            raise ParameterError("need M >= 1 and N >= 0")
        self.M = M
        self.N = N
        self.basis = sorted(self._occupations(M, N), reverse=True)
        self.index = {occ: i for i, occ in enumerate(self.basis)}
        self.dim = len(self.basis)

    @staticmethod
    def _occupations(M, N):
        if M == 1:
            return [(N,)]
        out = []
        for head in range(N + 1):
            for tail in BosonFockSpace._occupations(M - 1, N - head):
                out.append((head,) + tail)
        return out

    def state(self, occ) -> np.ndarray:
        v = np.zeros(self.dim)
        v[self.index[tuple(occ)]] = 1.0
        return v

    def excitation_matrix(self, create, annihilate) -> np.ndarray:
        """Matrix of ∏ b†_{create} ∏ b_{annihilate} on the fixed-N space."""
        if len(create) != len(annihilate):
            raise ParameterError("operator must conserve particle number")
        out = np.zeros((self.dim, self.dim))
        for col, occ in enumerate(self.basis):
            ns = list(occ)
            amp = 1.0
            ok = True
            for m in annihilate:
                if ns[m] == 0:
                    ok = False
                    break
                amp *= math.sqrt(ns[m])
                ns[m] -= 1
            if not ok:
                continue
            for m in create:
                amp *= math.sqrt(ns[m] + 1)
                ns[m] += 1
            out[self.index[tuple(ns)], col] += amp
        return out

    def number_matrix(self, mode: int) -> np.ndarray:
        return np.diag([float(occ[mode]) for occ in self.basis])

    def reference(self) -> np.ndarray:
        """(b†_0)^N |vac⟩ / √(N!): all particles in mode 0."""
        occ = (self.N,) + (0,) * (self.M - 1)
        return self.state(occ)


def bose_hubbard_fixed_n(space: BosonFockSpace, t, U, V, mu) -> np.ndarray:
    """Bose-Hubbard matrix on the fixed-N space (all pairs j > i)."""
    mus = [float(mu)] * space.M if np.isscalar(mu) else [float(x) for x in mu]
    if len(mus) != space.M:
        raise ParameterError("per-site mu must have one entry per mode")
    H = np.zeros((space.dim, space.dim))
    ns = [space.number_matrix(i) for i in range(space.M)]
    for i in range(space.M):
        H += -mus[i] * ns[i] + 0.5 * U * (ns[i] @ ns[i] - ns[i])
        for j in range(i + 1, space.M):
            hop = space.excitation_matrix((i,), (j,))
            H += -t * (hop + hop.T) + V * ns[i] @ ns[j]
    return H


# ---------------------------------------------------------------------------
# Coupled-cluster amplitude equations and effective Hamiltonians
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Excitation:
    """b†_{a1}…b†_{ak} (b_0)^k with a sorted multiset of target modes."""

    targets: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.targets)

    def matrix(self, space: BosonFockSpace) -> np.ndarray:
        return space.excitation_matrix(self.targets, (0,) * self.rank)

    def is_internal(self, active_modes) -> bool:
        return all(a in active_modes for a in self.targets)


def excitation_basis(space: BosonFockSpace, max_rank: int | None = None,
                     modes=None) -> list[Excitation]:
    """All target-mode multisets of ranks 1..max_rank out of mode 0."""
    if modes is None:
        modes = range(1, space.M)
    ranks = range(1, (max_rank or space.N) + 1)
    out = []
    for k in ranks:
        for targets in combinations_with_replacement(modes, k):
            out.append(Excitation(tuple(targets)))
    return out


def cluster_matrix(amplitudes, basis, space) -> np.ndarray:
    T = np.zeros((space.dim, space.dim))
    for t, exc in zip(amplitudes, basis):
        T += t * exc.matrix(space)
    return T


def solve_cc_amplitudes(H: np.ndarray, space: BosonFockSpace,
                        basis: list[Excitation], tol: float = 1e-10,
                        max_iter: int = 200, initial_guess=None):
    """Solve Q e^{−T} H e^{T}|Φ⟩ = 0 for the amplitudes of the given basis.

    Returns (amplitudes, energy, residual_norm); energy is
    ⟨Φ|e^{−T}He^{T}|Φ⟩.  Newton iteration starts from zero amplitudes
    unless ``initial_guess`` is given, so it finds the solution
    continuously connected to the reference.
    """
    phi = space.reference()
    configs = []
    for exc in basis:
        v = exc.matrix(space) @ phi
        nrm = np.linalg.norm(v)
        if nrm < 1e-14:
            raise ParameterError(f"excitation {exc.targets} annihilates the reference")
        configs.append(v / nrm)
    C = np.array(configs)

    def residual(ts):
        T = cluster_matrix(ts, basis, space)
        w = expm(-T) @ (H @ (expm(T) @ phi))
        return C @ w

    x0 = np.zeros(len(basis)) if initial_guess is None else np.asarray(initial_guess, dtype=float)
    sol = root(residual, x0, method="hybr",
               options={"maxfev": max_iter * (len(basis) + 1)})
    res_norm = float(np.linalg.norm(residual(sol.x)))
    if res_norm > 1e-8:
        raise ConvergenceError(
            "coupled-cluster amplitude equations did not converge",
            residual=res_norm,
        )
    T = cluster_matrix(sol.x, basis, space)
    energy = float(np.real(phi @ (expm(-T) @ (H @ (expm(T) @ phi)))))
    return sol.x, energy, res_norm


@dataclass(frozen=True)
class EffectiveHamiltonian:
    matrix: np.ndarray  # dense on the active configurations
    config_indices: tuple[int, ...]  # rows of the full space retained
    unitary: bool


def build_heff(H: np.ndarray, space: BosonFockSpace, amplitudes,
               basis: list[Excitation], active_modes,
               unitary: bool = False) -> EffectiveHamiltonian:
    """(P+Q_int) e^{−T_ext} H e^{T_ext} (P+Q_int), or the e^{σ_ext} variant.

    T_ext keeps only the external amplitudes (those with at least one
    target mode outside the active set); the retained configurations are
    the reference plus every basis state whose occupation lives entirely
    on the active modes ∪ {0}.
    """
    active = set(active_modes)
    T_ext = np.zeros((space.dim, space.dim))
    for t, exc in zip(amplitudes, basis):
        if not exc.is_internal(active):
            T_ext += t * exc.matrix(space)
    gen = T_ext - T_ext.T if unitary else T_ext
    if unitary:
        Ht = expm(-gen) @ H @ expm(gen)
    else:
        Ht = expm(-T_ext) @ H @ expm(T_ext)
    keep = [
        i for i, occ in enumerate(space.basis)
        if all(n == 0 or m == 0 or m in active for m, n in enumerate(occ))
    ]
    sub = Ht[np.ix_(keep, keep)]
    return EffectiveHamiltonian(sub, tuple(keep), unitary)


def mmcc_energy(H: np.ndarray, T: np.ndarray, phi: np.ndarray,
                psi: np.ndarray, qa_configs=None):
    """Moments-based energy functional and its moment-expansion form.

    direct = ⟨Ψ|H e^{T}|Φ⟩ / ⟨Ψ|e^{T}|Φ⟩; the moment form adds to the
    CC energy E_A the correction ⟨Ψ|e^{T} Q_R M|Φ⟩/⟨Ψ|e^{T}|Φ⟩ with
    M|Φ⟩ = e^{−T}He^{T}|Φ⟩ and Q_R the projector on configurations
    outside the reference and the parent excitation manifold.
    """
    eT = expm(T)
    denom = complex(np.vdot(psi, eT @ phi))
    if abs(denom) < 1e-10:
        raise DomainError("vanishing overlap ⟨Ψ|e^T|Φ⟩")
    direct = complex(np.vdot(psi, H @ (eT @ phi))) / denom
    m_vec = expm(-T) @ (H @ (eT @ phi))
    e_a = complex(np.vdot(phi, m_vec))
    qr = m_vec - phi * np.vdot(phi, m_vec)
    if qa_configs is not None:
        for c in qa_configs:
            qr = qr - c * np.vdot(c, qr)
    moment = e_a + complex(np.vdot(psi, eT @ qr)) / denom
    return {"direct": direct, "moment": moment, "cc_energy": e_a}


# ---------------------------------------------------------------------------
# Disentangled five-rotation ansatz for the 3-level, 2-boson model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AnsatzParams:
    """Givens angles: (r1, r2) act between modes 0-1, (s1, s2, s3) reach mode 2."""

    r1: float = 0.0
    r2: float = 0.0
    s1: float = 0.0
    s2: float = 0.0
    s3: float = 0.0

    def as_list(self):
        return [self.r1, self.r2, self.s1, self.s2, self.s3]


def duccsd_generators(space: BosonFockSpace):
    """Ordered anti-Hermitian generators (application order r1,r2,s1,s2,s3)."""
    if (space.M, space.N) != (3, 2):
        raise ParameterError("the five-rotation ansatz targets M=3, N=2")

    def anti(create, annihilate):
        E = space.excitation_matrix(create, annihilate)
        return E - E.T

    return [
        ("r1", anti((1, 1), (0, 0))),
        ("r2", anti((1,), (0,))),
        ("s1", anti((2, 2), (0, 0))),
        ("s2", anti((2, 1), (0, 0))),
        ("s3", anti((2,), (0,))),
    ]


def givens_apply(generator: np.ndarray, angle: float, psi: np.ndarray) -> np.ndarray:
    """ψ' = e^{angle·σ} ψ for an anti-Hermitian generator σ."""
    G = np.asarray(generator)
    if np.max(np.abs(G + G.conj().T)) > 1e-10:
        raise DomainError("generator must be anti-Hermitian")
    return expm(angle * G) @ np.asarray(psi, dtype=float if np.isrealobj(psi) else complex)


def apply_ansatz(params: AnsatzParams, space: BosonFockSpace | None = None) -> np.ndarray:
    """|φ⟩ = e^{s3σ}e^{s2σ}e^{s1σ}e^{r2σ}e^{r1σ}|200⟩."""
    space = space or BosonFockSpace(3, 2)
    psi = space.reference()
    for (_, G), angle in zip(duccsd_generators(space), params.as_list()):
        psi = expm(angle * G) @ psi
    return psi


def _wrap_angle(theta: float) -> float:
    """Wrap to the principal range (−π/2, π/2]."""
    while theta > math.pi / 2:
        theta -= math.pi
    while theta <= -math.pi / 2:
        theta += math.pi
    return theta


def _spin1_elimination_angle(d_low, d_mid, d_high, weight=math.sqrt(2.0)):
    """Angle θ zeroing the middle amplitude of a three-level ladder rotation.

    Solves cos(2θ)·d_mid = (weight/2)·sin(2θ)·(d_low − d_high) via the
    quadratic in tan θ; of the two real roots, the one of smaller
    magnitude is returned.
    """
    if abs(d_mid) < 1e-14:
        return 0.0
    diff = d_low - d_high
    disc = math.sqrt(weight * weight * diff * diff + 4.0 * d_mid * d_mid)
    roots = [
        math.atan((-weight * diff + disc) / (2.0 * d_mid)),
        math.atan((-weight * diff - disc) / (2.0 * d_mid)),
    ]
    return min(roots, key=abs)


def decompose_state(psi: np.ndarray, space: BosonFockSpace | None = None) -> AnsatzParams:
    """Reverse flow: peel off s3, s2, s1, r2, r1 to recover ansatz angles.

    Requires a real, normalized 6-dimensional state; the returned angles
    satisfy apply_ansatz(params) = ±ψ.
    """
    space = space or BosonFockSpace(3, 2)
    psi = np.asarray(psi, dtype=float)
    if psi.shape != (space.dim,):
        raise DimensionError("expected a state on the 3-level, 2-boson space")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ParameterError("state must be normalized")
    gens = dict(duccsd_generators(space))
    idx = space.index
    i200, i110, i020 = idx[(2, 0, 0)], idx[(1, 1, 0)], idx[(0, 2, 0)]
    i101, i011, i002 = idx[(1, 0, 1)], idx[(0, 1, 1)], idx[(0, 0, 2)]

    # s3: zero |101⟩ within the (|200⟩, |101⟩, |002⟩) ladder
    s3 = _spin1_elimination_angle(psi[i200], psi[i101], psi[i002])
    psi = expm(-s3 * gens["s3"]) @ psi
    # s2: zero |011⟩ (pure 2-level rotation with |200⟩, angle √2·s2);
    # wrapping the rotation angle by π may flip the state's overall sign,
    # which the global-sign convention absorbs
    s2 = _wrap_angle(math.atan2(psi[i011], psi[i200])) / math.sqrt(2.0)
    psi = expm(-s2 * gens["s2"]) @ psi
    # s1: zero |002⟩ (2-level rotation with |200⟩, angle 2·s1)
    s1 = _wrap_angle(math.atan2(psi[i002], psi[i200])) / 2.0
    psi = expm(-s1 * gens["s1"]) @ psi
    # r2: zero |110⟩ within the (|200⟩, |110⟩, |020⟩) ladder
    r2 = _spin1_elimination_angle(psi[i200], psi[i110], psi[i020])
    psi = expm(-r2 * gens["r2"]) @ psi
    # r1: zero |020⟩ (2-level rotation with |200⟩, angle 2·r1)
    r1 = _wrap_angle(math.atan2(psi[i020], psi[i200])) / 2.0
    return AnsatzParams(r1, r2, s1, s2, s3)


def nested_optimize(H: np.ndarray, space: BosonFockSpace | None = None,
                    tol: float = 1e-10, max_iter: int = 60):
    """Alternating macro/micro optimization of the five-rotation ansatz.

    Micro: simplex minimization of ⟨φ|H|φ⟩ over the mode-2 angles
    (s1, s2, s3) at fixed (r1, r2).  Macro: hold the outer unitary
    (the s rotations) constant, build the 3×3 effective Hamiltonian on
    span{|200⟩, |110⟩, |020⟩}, diagonalize, and extract (r1, r2) from
    the lowest eigenvector by the two-parameter reverse flow.

    Returns {"energy", "params", "H_eff", "trace"}; trace entries are
    (iteration, |E − E_exact|).
    """
    space = space or BosonFockSpace(3, 2)
    gens = duccsd_generators(space)
    idx = space.index
    active = [idx[(2, 0, 0)], idx[(1, 1, 0)], idx[(0, 2, 0)]]
    e_exact = float(np.linalg.eigvalsh(H)[0])

    def energy(params: AnsatzParams) -> float:
        v = apply_ansatz(params, space)
        return float(v @ H @ v)

    params = AnsatzParams()
    e_prev = math.inf
    trace = []
    h_eff = None
    for it in range(1, max_iter + 1):
        # micro sweep over the s angles
        def micro(svec):
            return energy(AnsatzParams(params.r1, params.r2, *svec))

        res = minimize(micro, [params.s1, params.s2, params.s3],
                       method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-12, "maxiter": 4000})
        params = AnsatzParams(params.r1, params.r2, *res.x)
        # macro update: active-space diagonalization at fixed outer unitary
        outer = (expm(params.s3 * gens[4][1]) @ expm(params.s2 * gens[3][1])
                 @ expm(params.s1 * gens[2][1]))
        Ht = outer.T @ H @ outer
        h_eff = Ht[np.ix_(active, active)]
        w, V = np.linalg.eigh(h_eff)
        vec = V[:, 0]
        if vec[0] < 0:
            vec = -vec
        full = np.zeros(space.dim)
        for i, a in enumerate(active):
            full[a] = vec[i]
        r2 = _spin1_elimination_angle(full[active[0]], full[active[1]], full[active[2]])
        tmp = expm(-r2 * gens[1][1]) @ full
        r1 = 0.5 * math.atan2(tmp[active[2]], tmp[active[0]])
        params = AnsatzParams(r1, r2, params.s1, params.s2, params.s3)
        e_now = energy(params)
        trace.append((it, abs(e_now - e_exact)))
        if abs(e_now - e_prev) < tol:
            break
        e_prev = e_now
    else:
        raise ConvergenceError("nested optimization hit the iteration cap", trace=trace)
    return {"energy": e_now, "params": params, "H_eff": h_eff, "trace": trace}
