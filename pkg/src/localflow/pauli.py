"""Exact algebra of multi-qubit Pauli operators.

Terms keep a sparse letter map (absent qubit means identity) and a complex
coefficient.  Products never multiply floating-point phases: the power of
``i`` produced by the single-qubit relations is applied as an exact
quarter-turn rotation of the coefficient, so Clifford bookkeeping stays
exactly in ``{+1, -1, +i, -i}``.

Textual form of a term is ``<coeff> * <P>@<id> <P>@<id> ...`` with pairs
sorted by qubit id, e.g. ``-1 * X@A Z@B``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, ResourceError

MAX_DENSE_QUBITS = 12


class PauliLetter(str, enum.Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"

    @property
    def index(self) -> int:
        return _LETTER_INDEX[self]


_LETTER_INDEX = {PauliLetter.I: 0, PauliLetter.X: 1, PauliLetter.Y: 2, PauliLetter.Z: 3}
_INDEX_LETTER = {v: k for k, v in _LETTER_INDEX.items()}

_MATRICES = {
    PauliLetter.I: np.eye(2, dtype=complex),
    PauliLetter.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliLetter.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    PauliLetter.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(letter) -> np.ndarray:
    return _MATRICES[PauliLetter(letter)].copy()


def qubit_key(qubit):
    """Sort key for qubit ids: integers numerically, then strings lexically."""
    if isinstance(qubit, (int, np.integer)) and not isinstance(qubit, bool):
        return (0, int(qubit), "")
    return (1, 0, str(qubit))


def _letter_product(a: int, b: int) -> tuple[int, int]:
    """Return (power of i, letter index) for sigma_a * sigma_b."""
    if a == 0:
        return 0, b
    if b == 0:
        return 0, a
    if a == b:
        return 0, 0
    # X*Y = iZ and cyclic; anticyclic order picks up -i.
    return (1 if (b - a) % 3 == 1 else 3), a ^ b


def rotate(c: complex, k: int) -> complex:
    """Multiply ``c`` by ``i**k`` via component swaps (no rounding)."""
    re_, im = c.real, c.imag
    k %= 4
    if k == 0:
        return complex(re_, im)
    if k == 1:
        return complex(-im, re_)
    if k == 2:
        return complex(-re_, -im)
    return complex(im, -re_)


def _format_real(x: float) -> str:
    if x == 0:
        return "0"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return format(x, ".12g")


def format_coefficient(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return _format_real(c.real)
    if c.real == 0:
        return _format_real(c.imag) + "i"
    sign = "+" if c.imag > 0 else "-"
    return f"({_format_real(c.real)}{sign}{_format_real(abs(c.imag))}i)"


def _parse_coefficient(text: str) -> complex:
    text = text.strip()
    if text.startswith("(") and text.endswith(")"):
        return complex(text[1:-1].replace("i", "j"))
    if text.endswith("i"):
        return complex(0.0, float(text[:-1]))
    return complex(float(text), 0.0)


@dataclass(frozen=True)
class PauliTerm:
    """A coefficient times a tensor product of Pauli letters.

    ``letters`` is a tuple of ``(qubit_id, PauliLetter)`` pairs sorted by
    :func:`qubit_key`; identity letters are never stored.
    """

    coeff: complex = 1.0 + 0j
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coeff", complex(self.coeff))
        cleaned = {}
        for q, p in self.letters:
            p = PauliLetter(p)
            if q in cleaned:
                raise InputError(f"qubit {q!r} appears twice in one term")
            if p is not PauliLetter.I:
                cleaned[q] = p
        ordered = tuple(sorted(cleaned.items(), key=lambda kv: qubit_key(kv[0])))
        object.__setattr__(self, "letters", ordered)

    @classmethod
    def from_map(cls, letters: Mapping, coeff: complex = 1.0) -> "PauliTerm":
        return cls(coeff, tuple(letters.items()))

    @classmethod
    def single(cls, letter, qubit, coeff: complex = 1.0) -> "PauliTerm":
        return cls(coeff, ((qubit, PauliLetter(letter)),))

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> "PauliTerm":
        return cls(coeff, ())

    @classmethod
    def parse(cls, text: str) -> "PauliTerm":
        """Inverse of :meth:`render`. Qubit ids are read back as strings."""
        try:
            coeff_text, body = text.split("*", 1)
        except ValueError:
            raise InputError(f"cannot parse Pauli term {text!r}") from None
        letters = []
        for tok in body.split():
            if tok == "I":
                continue
            m = re.fullmatch(r"([IXYZ])@(\S+)", tok)
            if m is None:
                raise InputError(f"bad Pauli token {tok!r}")
            letters.append((m.group(2), m.group(1)))
        return cls(_parse_coefficient(coeff_text), tuple(letters))

    @property
    def letter_map(self) -> dict:
        return dict(self.letters)

    @property
    def support(self) -> frozenset:
        return frozenset(q for q, _ in self.letters)

    def letter(self, qubit) -> PauliLetter:
        return self.letter_map.get(qubit, PauliLetter.I)

    @property
    def is_hermitian(self) -> bool:
        return self.coeff.imag == 0

    def with_coeff(self, coeff: complex) -> "PauliTerm":
        return PauliTerm(coeff, self.letters)

    def render(self) -> str:
        body = " ".join(f"{p.value}@{q}" for q, p in self.letters) or "I"
        return f"{format_coefficient(self.coeff)} * {body}"

    def __str__(self) -> str:
        return self.render()

    def __neg__(self) -> "PauliTerm":
        return self.with_coeff(rotate(self.coeff, 2))

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            return multiply(self, other)
        if isinstance(other, PauliSum):
            return PauliSum([self]) * other
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_coeff(self.coeff * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.with_coeff(other * self.coeff)
        return NotImplemented

    def __add__(self, other):
        return PauliSum([self]) + other

    def commutes_with(self, other: "PauliTerm") -> bool:
        anti = 0
        other_map = other.letter_map
        for q, p in self.letters:
            o = other_map.get(q)
            if o is not None and o is not p:
                anti += 1
        return anti % 2 == 0


def multiply(a: PauliTerm, b: PauliTerm) -> PauliTerm:
    """Exact operator product ``a @ b`` as a single term."""
    k = 0
    out = dict(a.letters)
    for q, p in b.letters:
        if q in out:
            dk, idx = _letter_product(out[q].index, p.index)
            k += dk
            if idx == 0:
                del out[q]
            else:
                out[q] = _INDEX_LETTER[idx]
        else:
            out[q] = p
    return PauliTerm(rotate(a.coeff * b.coeff, k), tuple(out.items()))


@dataclass(frozen=True)
class PauliSum:
    """Linear combination of Pauli terms with distinct letter maps.

    Terms are merged on construction and kept sorted by letter map; exact
    zero coefficients are dropped, so the empty sum is the zero operator.
    """

    terms: tuple = field(default=())

    def __init__(self, terms: Iterable = ()):
        merged: dict = {}
        for t in terms:
            if isinstance(t, PauliSum):
                items = t.terms
            else:
                items = (t,)
            for term in items:
                if term.letters in merged:
                    merged[term.letters] = merged[term.letters] + term.coeff
                else:
                    merged[term.letters] = term.coeff
        kept = [PauliTerm(c, letters) for letters, c in merged.items() if c != 0]
        kept.sort(key=lambda t: [(qubit_key(q), p.index) for q, p in t.letters])
        object.__setattr__(self, "terms", tuple(kept))

    @classmethod
    def coerce(cls, obs) -> "PauliSum":
        if isinstance(obs, PauliSum):
            return obs
        if isinstance(obs, PauliTerm):
            return cls([obs])
        raise InputError(f"not a Pauli observable: {obs!r}")

    @classmethod
    def zero(cls) -> "PauliSum":
        return cls(())

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_single_term(self) -> bool:
        return len(self.terms) == 1

    @property
    def support(self) -> frozenset:
        out = frozenset()
        for t in self.terms:
            out |= t.support
        return out

    @property
    def is_hermitian(self) -> bool:
        return all(t.is_hermitian for t in self.terms)

    def render(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(t.render() for t in self.terms)

    def __str__(self) -> str:
        return self.render()

    def __neg__(self) -> "PauliSum":
        return PauliSum(-t for t in self.terms)

    def __add__(self, other):
        if isinstance(other, (PauliTerm, PauliSum)):
            return PauliSum([self, other])
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-PauliSum.coerce(other))

    def __mul__(self, other):
        if isinstance(other, PauliTerm):
            other = PauliSum([other])
        if isinstance(other, PauliSum):
            return PauliSum(multiply(a, b) for a in self.terms for b in other.terms)
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum(t * other for t in self.terms)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, PauliTerm):
            return PauliSum([other]) * self
        if isinstance(other, (int, float, complex, np.number)):
            return PauliSum(other * t for t in self.terms)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, PauliTerm):
            other = PauliSum([other])
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)


def identity_sum() -> PauliSum:
    return PauliSum([PauliTerm.identity()])


def commutator(a, b) -> PauliSum:
    a, b = PauliSum.coerce(a), PauliSum.coerce(b)
    return a * b - b * a


@dataclass(frozen=True)
class BasisProductState:
    """Product of sigma_z eigenstates with a global phase.

    ``eigenvalues`` maps qubit id to +1 or -1; iteration order of the map is
    the qubit order used when the state is expanded to a dense vector.
    """

    eigenvalues: Mapping
    phase: complex = 1.0 + 0j

    def __post_init__(self):
        ev = dict(self.eigenvalues)
        for q, v in ev.items():
            if v not in (1, -1):
                raise InputError(f"eigenvalue of qubit {q!r} must be +1 or -1, got {v!r}")
            ev[q] = int(v)
        if abs(abs(complex(self.phase)) - 1.0) > 1e-12:
            raise InputError(f"global phase must have unit modulus, got {self.phase!r}")
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def qubits(self) -> tuple:
        return tuple(self.eigenvalues)


def expectation(obs, state: BasisProductState) -> complex:
    """Exact ``<state| obs |state>``; the global phase cancels."""
    total = 0j
    for term in PauliSum.coerce(obs).terms:
        factor = 1
        for q, p in term.letters:
            if q not in state.eigenvalues:
                raise InputError(f"observable references unknown qubit {q!r}")
            if p is PauliLetter.Z:
                factor *= state.eigenvalues[q]
            else:
                factor = 0
        if factor:
            total += factor * term.coeff
    return total


def to_dense_matrix(obs, qubits: int | Sequence[Hashable]) -> np.ndarray:
    """Kronecker expansion of ``obs`` over ``qubits`` (first id is most significant).

    ``qubits`` may be an integer n, meaning ids ``0..n-1``.
    """
    if isinstance(qubits, (int, np.integer)):
        qubits = list(range(int(qubits)))
    qubits = list(qubits)
    n = len(qubits)
    if n > MAX_DENSE_QUBITS:
        raise ResourceError(f"{n} qubits exceeds dense oracle limit of {MAX_DENSE_QUBITS}")
    known = set(qubits)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for term in PauliSum.coerce(obs).terms:
        lm = term.letter_map
        extra = set(lm) - known
        if extra:
            raise InputError(f"observable references unknown qubits {sorted(map(str, extra))}")
        mat = np.array([[term.coeff]], dtype=complex)
        for q in qubits:
            mat = np.kron(mat, _MATRICES[lm.get(q, PauliLetter.I)])
        out += mat
    return out
