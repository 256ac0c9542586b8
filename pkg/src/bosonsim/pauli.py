"""Exact symbolic algebra over tensor products of Pauli and ladder operators.

Operators are stored as linear combinations of Pauli strings ("letters" over
{I, X, Y, Z}).  Qubit 0 is the leftmost letter and the most significant
tensor factor, so ``to_matrix`` Kroneckers the letters left to right.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import CapacityError, DimensionError, ParameterError

PRUNE_TOL = 1e-12
DENSE_LIMIT = 14

_LETTERS = "IXYZ"

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Single-qubit Pauli group products: (a, b) -> (phase, c) with a·b = phase·c.
_PROD = {}
for _a in _LETTERS:
    for _b in _LETTERS:
        _m = _SINGLE[_a] @ _SINGLE[_b]
        for _c in _LETTERS:
            for _ph in (1, -1, 1j, -1j):
                if np.allclose(_m, _ph * _SINGLE[_c]):
                    _PROD[(_a, _b)] = (_ph, _c)
del _a, _b, _c, _m, _ph


@dataclass(frozen=True)
class PauliTerm:
    """A single Pauli string with a complex coefficient."""

    letters: str
    coefficient: complex

    def __post_init__(self):
        bad = set(self.letters) - set(_LETTERS)
        if bad:
            raise ParameterError(f"invalid Pauli letters: {sorted(bad)}")

    @property
    def qubit_count(self) -> int:
        return len(self.letters)

    def to_matrix(self, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
        if self.qubit_count > dense_limit:
            raise CapacityError(
                f"{self.qubit_count} qubits exceeds dense limit {dense_limit}"
            )
        m = np.array([[self.coefficient]], dtype=complex)
        for letter in self.letters:
            m = np.kron(m, _SINGLE[letter])
        return m


def mul(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Pauli group product of two terms, phase folded into the coefficient."""
    if len(a.letters) != len(b.letters):
        raise DimensionError(
            f"letter length mismatch: {len(a.letters)} vs {len(b.letters)}"
        )
    phase = a.coefficient * b.coefficient
    out = []
    for la, lb in zip(a.letters, b.letters):
        ph, lc = _PROD[(la, lb)]
        phase *= ph
        out.append(lc)
    return PauliTerm("".join(out), phase)


class PauliSum:
    """Linear combination of Pauli strings on a fixed number of qubits.

    Immutable; like terms are always merged.  Terms with coefficients at or
    below the pruning tolerance are dropped by :meth:`simplify`.
    """

    __slots__ = ("_terms", "_n")

    def __init__(self, terms: Mapping[str, complex] | Iterable[PauliTerm], qubit_count: int):
        if qubit_count < 0:
            raise ParameterError("qubit_count must be non-negative")
        acc: dict[str, complex] = {}
        if isinstance(terms, Mapping):
            items = ((k, complex(v)) for k, v in terms.items())
        else:
            items = ((t.letters, complex(t.coefficient)) for t in terms)
        for letters, coeff in items:
            if len(letters) != qubit_count:
                raise DimensionError(
                    f"term {letters!r} has {len(letters)} letters, expected {qubit_count}"
                )
            acc[letters] = acc.get(letters, 0.0) + coeff
        object.__setattr__(self, "_terms", {k: v for k, v in acc.items() if v != 0})
        object.__setattr__(self, "_n", qubit_count)

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(qubit_count: int) -> "PauliSum":
        return PauliSum({}, qubit_count)

    @staticmethod
    def identity(qubit_count: int, coeff: complex = 1.0) -> "PauliSum":
        return PauliSum({"I" * qubit_count: coeff}, qubit_count)

    @staticmethod
    def from_term(letters: str, coeff: complex = 1.0) -> "PauliSum":
        return PauliSum({letters: coeff}, len(letters))

    # -- views ---------------------------------------------------------
    @property
    def qubit_count(self) -> int:
        return self._n

    @property
    def terms(self) -> tuple[PauliTerm, ...]:
        """Terms in canonical lexicographic letter order."""
        return tuple(
            PauliTerm(k, self._terms[k]) for k in sorted(self._terms)
        )

    def coefficient(self, letters: str) -> complex:
        return self._terms.get(letters, 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    def __repr__(self) -> str:
        body = " + ".join(f"({v})·{k}" for k, v in sorted(self._terms.items()))
        return f"PauliSum[{self._n}]({body or '0'})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, frozenset(self._terms.items())))

    # -- algebra ---------------------------------------------------------
    def _require_same_width(self, other: "PauliSum"):
        if self._n != other._n:
            raise DimensionError(f"qubit counts differ: {self._n} vs {other._n}")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._require_same_width(other)
        acc = dict(self._terms)
        for k, v in other._terms.items():
            acc[k] = acc.get(k, 0.0) + v
        return PauliSum(acc, self._n)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __neg__(self) -> "PauliSum":
        return (-1.0) * self

    def __rmul__(self, scalar) -> "PauliSum":
        if isinstance(scalar, PauliSum):
            return NotImplemented
        return PauliSum({k: scalar * v for k, v in self._terms.items()}, self._n)

    def __mul__(self, other) -> "PauliSum":
        if not isinstance(other, PauliSum):
            return PauliSum({k: other * v for k, v in self._terms.items()}, self._n)
        self._require_same_width(other)
        acc: dict[str, complex] = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                t = mul(PauliTerm(ka, va), PauliTerm(kb, vb))
                acc[t.letters] = acc.get(t.letters, 0.0) + t.coefficient
        return PauliSum(acc, self._n)

    def tensor(self, other: "PauliSum") -> "PauliSum":
        acc = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                acc[ka + kb] = acc.get(ka + kb, 0.0) + va * vb
        return PauliSum(acc, self._n + other._n)

    def adjoint(self) -> "PauliSum":
        return PauliSum({k: np.conj(v) for k, v in self._terms.items()}, self._n)

    def simplify(self, tol: float = PRUNE_TOL) -> "PauliSum":
        """Merge like terms (always maintained) and prune |coeff| <= tol."""
        if tol < 0:
            raise ParameterError("tol must be non-negative")
        return PauliSum(
            {k: v for k, v in self._terms.items() if abs(v) > tol}, self._n
        )

    def to_matrix(self, dense_limit: int = DENSE_LIMIT) -> np.ndarray:
        if self._n > dense_limit:
            raise CapacityError(
                f"{self._n} qubits exceeds dense limit {dense_limit}"
            )
        dim = 2 ** self._n
        out = np.zeros((dim, dim), dtype=complex)
        for k, v in self._terms.items():
            out += PauliTerm(k, v).to_matrix(dense_limit)
        return out

    # -- serialization -----------------------------------------------------
    def to_text(self) -> str:
        """One term per line: '<coeff_re> <coeff_im> <LETTERS>', MSB first."""
        lines = []
        for k in sorted(self._terms):
            v = self._terms[k]
            lines.append(f"{v.real!r} {v.imag!r} {k}")
        return "\n".join(lines) + ("\n" if lines else "")

    @staticmethod
    def from_text(text: str, qubit_count: int | None = None) -> "PauliSum":
        acc: dict[str, complex] = {}
        n = qubit_count
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParameterError(f"line {lineno}: expected 're im LETTERS'")
            re_s, im_s, letters = parts
            if n is None:
                n = len(letters)
            coeff = complex(float(re_s), float(im_s))
            acc[letters] = acc.get(letters, 0.0) + coeff
        if n is None:
            raise ParameterError("cannot infer qubit count from empty text")
        return PauliSum(acc, n)


def ladder(kind: str) -> PauliSum:
    """Single-qubit ladder operator: (+) = ½(X+iY) = |0⟩⟨1|, (−) = ½(X−iY)."""
    if kind == "plus":
        return PauliSum({"X": 0.5, "Y": 0.5j}, 1)
    if kind == "minus":
        return PauliSum({"X": 0.5, "Y": -0.5j}, 1)
    raise ParameterError(f"kind must be 'plus' or 'minus', got {kind!r}")


def projector(bit: int) -> PauliSum:
    """Single-qubit |bit⟩⟨bit| as ½(I ± Z)."""
    if bit == 0:
        return PauliSum({"I": 0.5, "Z": 0.5}, 1)
    if bit == 1:
        return PauliSum({"I": 0.5, "Z": -0.5}, 1)
    raise ParameterError("bit must be 0 or 1")


def outer_1q(row_bit: int, col_bit: int) -> PauliSum:
    """Single-qubit outer product |row⟩⟨col| in Pauli form."""
    if row_bit == col_bit:
        return projector(row_bit)
    if (row_bit, col_bit) == (0, 1):
        return ladder("plus")
    if (row_bit, col_bit) == (1, 0):
        return ladder("minus")
    raise ParameterError("bits must be 0 or 1")
