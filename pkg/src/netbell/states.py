"""Stabilizer-group states, mixtures of them, and a dense state-vector backend.

A ``StabilizerGroup`` holds k <= n independent, pairwise commuting Hermitian
Pauli generators and represents the uniform (maximally mixed) state on the
stabilized subspace; k = n is a pure stabilizer state and k = 0 the maximally
mixed state.  Expectation values of Hermitian Pauli words are exact:

    <P> = +1 if P is in the group, -1 if -P is, 0 otherwise,

decided by GF(2) elimination over the symplectic rows with exact phase
accumulation.  ``StabilizerMixture`` takes convex combinations.  ``DenseState``
is the (slow, n <= 14) state-vector oracle used to cross-check the group
backend and to drive sampling.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import network
from .pauli import PauliString, word

DENSE_MAX_QUBITS = 14

# generator signs (z_sign, x_sign) for the four two-qubit pair states
PAIR_SIGNS = {
    "phi+": (1, 1),
    "phi-": (1, -1),
    "psi+": (-1, 1),
    "psi-": (-1, -1),
}


@dataclass(frozen=True)
class StabilizerGroup:
    """Independent commuting Hermitian generators on ``n_qubits`` qubits."""

    n_qubits: int
    generators: tuple[PauliString, ...]

    def __post_init__(self) -> None:
        for g in self.generators:
            if g.n_qubits != self.n_qubits:
                raise ValueError("generator register size mismatch")
            if not g.is_hermitian:
                raise ValueError(f"generator {g} has phase +-i")
        for i, g in enumerate(self.generators):
            for h in self.generators[i + 1:]:
                if not g.commutes(h):
                    raise ValueError(f"generators {g} and {h} anticommute")
        if len(self.generators) > self.n_qubits:
            raise ValueError("more generators than qubits")
        if len(self._echelon) != len(self.generators):
            raise ValueError("generators are not independent over GF(2)")

    @functools.cached_property
    def _echelon(self) -> list[tuple[int, int, int]]:
        """Row-reduced symplectic rows as (bits, pivot, generator-subset mask)."""
        rows: list[tuple[int, int, int]] = []
        n = self.n_qubits
        for idx, g in enumerate(self.generators):
            bits = (g.x_mask << n) | g.z_mask
            combo = 1 << idx
            for row, pivot, cmb in rows:
                if (bits >> pivot) & 1:
                    bits ^= row
                    combo ^= cmb
            if bits:
                rows.append((bits, bits.bit_length() - 1, combo))
        return rows

    @property
    def rank(self) -> int:
        return len(self.generators)

    @property
    def is_pure(self) -> bool:
        return self.rank == self.n_qubits

    def membership_sign(self, p: PauliString) -> int | None:
        """+1 if p is in the group, -1 if -p is, None if outside the span."""
        if p.n_qubits != self.n_qubits:
            raise ValueError("register size mismatch")
        if not p.is_hermitian:
            raise ValueError("membership is defined for Hermitian words")
        n = self.n_qubits
        bits = (p.x_mask << n) | p.z_mask
        combo = 0
        for row, pivot, cmb in self._echelon:
            if (bits >> pivot) & 1:
                bits ^= row
                combo ^= cmb
        if bits:
            return None
        element = word({}, n)  # identity
        for idx, g in enumerate(self.generators):
            if (combo >> idx) & 1:
                element = element * g
        return 1 if element.phase == p.phase else -1


@dataclass(frozen=True)
class StabilizerMixture:
    """Convex combination of stabilizer groups on a common register."""

    n_qubits: int
    components: tuple[tuple[float, StabilizerGroup], ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("mixture needs at least one component")
        for w, g in self.components:
            if g.n_qubits != self.n_qubits:
                raise ValueError("component register size mismatch")
            if w < -1e-15:
                raise ValueError("negative weight")
        total = sum(w for w, _ in self.components)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {total}, not 1")


@dataclass(frozen=True)
class DenseState:
    """Normalized state vector, qubit q <-> bit q of the amplitude index."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude vector has wrong length")
        nrm = float(np.linalg.norm(self.amplitudes))
        if abs(nrm - 1.0) > 1e-12:
            raise ValueError(f"state vector norm {nrm} != 1")


State = Union[StabilizerGroup, StabilizerMixture, DenseState]


# -- expectation values -------------------------------------------------------

def expectation(state: State, p: PauliString) -> float:
    """Exact (group/mixture) or dense expectation of a Hermitian Pauli word."""
    if not p.is_hermitian:
        raise ValueError(f"{p} is not Hermitian")
    if isinstance(state, StabilizerGroup):
        sign = state.membership_sign(p)
        return float(sign) if sign is not None else 0.0
    if isinstance(state, StabilizerMixture):
        return float(sum(w * expectation(g, p) for w, g in state.components))
    if isinstance(state, DenseState):
        if p.n_qubits != state.n_qubits:
            raise ValueError("register size mismatch")
        bra = state.amplitudes.conj()
        val = complex(np.dot(bra, apply_pauli(p, state.amplitudes)))
        return float(val.real)
    raise TypeError(f"unsupported state type {type(state)!r}")


def _parity(a: np.ndarray) -> np.ndarray:
    a = a.astype(np.uint64, copy=True)
    for shift in (32, 16, 8, 4, 2, 1):
        a ^= a >> np.uint64(shift)
    return (a & np.uint64(1)).astype(np.int64)


def apply_pauli(p: PauliString, amplitudes: np.ndarray) -> np.ndarray:
    """Apply a phased Pauli word to a dense amplitude vector."""
    n = p.n_qubits
    dim = 1 << n
    if amplitudes.shape != (dim,):
        raise ValueError("amplitude vector has wrong length")
    idx = np.arange(dim, dtype=np.uint64)
    # P|b> = phase * i^{|x&z|} * (-1)^{|z&b|} |b ^ x>
    front = p.phase * (1j ** ((p.x_mask & p.z_mask).bit_count()))
    signs = 1.0 - 2.0 * _parity(idx & np.uint64(p.z_mask))
    out = np.zeros(dim, dtype=complex)
    out[idx ^ np.uint64(p.x_mask)] = front * signs * np.asarray(amplitudes)
    return out


def to_dense(group: StabilizerGroup) -> DenseState:
    """Project a computational basis state into the stabilized subspace."""
    n = group.n_qubits
    if n > DENSE_MAX_QUBITS:
        raise ValueError(f"dense backend capped at {DENSE_MAX_QUBITS} qubits")
    dim = 1 << n
    for basis in range(dim):
        psi = np.zeros(dim, dtype=complex)
        psi[basis] = 1.0
        for g in group.generators:
            psi = (psi + apply_pauli(g, psi)) / 2.0
        nrm = float(np.linalg.norm(psi))
        if nrm > 1e-6:
            return DenseState(n, psi / nrm)
    raise ValueError("generators stabilize no state")


# -- state builders -----------------------------------------------------------

def bell_pair(i: int, j: int, n_qubits: int,
              z_sign: int = 1, x_sign: int = 1) -> StabilizerGroup:
    """Two-qubit pair state on qubits (i, j): generators z_sign*ZZ, x_sign*XX."""
    if i == j:
        raise ValueError("pair qubits must differ")
    gens = (
        word({i: "Z", j: "Z"}, n_qubits, z_sign),
        word({i: "X", j: "X"}, n_qubits, x_sign),
    )
    return StabilizerGroup(n_qubits, gens)


def ghz3(i: int, j: int, k: int, n_qubits: int) -> StabilizerGroup:
    """Three-qubit GHZ state on qubits (i, j, k)."""
    if len({i, j, k}) != 3:
        raise ValueError("GHZ qubits must be distinct")
    gens = (
        word({i: "X", j: "Z", k: "Z"}, n_qubits),
        word({i: "Z", j: "X", k: "Z"}, n_qubits),
        word({i: "Z", j: "Z", k: "X"}, n_qubits),
    )
    return StabilizerGroup(n_qubits, gens)


def maximally_mixed(n_qubits: int) -> StabilizerGroup:
    return StabilizerGroup(n_qubits, ())


def product_group(groups: Iterable[StabilizerGroup]) -> StabilizerGroup:
    """Union of generator sets (groups must live on the same register)."""
    groups = list(groups)
    if not groups:
        raise ValueError("no groups given")
    n = groups[0].n_qubits
    gens: list[PauliString] = []
    for g in groups:
        if g.n_qubits != n:
            raise ValueError("register size mismatch")
        gens.extend(g.generators)
    return StabilizerGroup(n, tuple(gens))


def two_component_mixture(q: float, a: StabilizerGroup,
                          b: StabilizerGroup) -> StabilizerMixture:
    """q * a + (1 - q) * b."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    return StabilizerMixture(a.n_qubits, ((q, a), (1.0 - q, b)))


def smolin(i: int = 0, j: int = 1, k: int = 2, l: int = 3,
           n_qubits: int | None = None) -> StabilizerMixture:
    """Equal mixture of the four identical pair-state products on (i,j),(k,l)."""
    if n_qubits is None:
        n_qubits = max(i, j, k, l) + 1
    comps = []
    for zs, xs in PAIR_SIGNS.values():
        group = product_group([
            bell_pair(i, j, n_qubits, zs, xs),
            bell_pair(k, l, n_qubits, zs, xs),
        ])
        comps.append((0.25, group))
    return StabilizerMixture(n_qubits, tuple(comps))


def network_state(topology: network.NetworkTopology) -> StabilizerGroup:
    """Natural product state: a pair state / GHZ state per source."""
    groups = []
    for s in topology.sources:
        if s.kind == network.BELL:
            groups.append(bell_pair(*s.qubits, topology.n_qubits))
        elif s.kind == network.GHZ3:
            groups.append(ghz3(*s.qubits, topology.n_qubits))
        else:  # pragma: no cover - SourceSpec already validates
            raise ValueError(f"unknown source kind {s.kind}")
    return StabilizerGroup(topology.n_qubits, tuple(
        g for grp in groups for g in grp.generators))


# -- textual state selectors ---------------------------------------------------

_MIX_RE = re.compile(r"^mix\(\s*([0-9.eE+-]+)\s*,\s*([^,]+?)\s*,\s*([^,]+?)\s*\)$")
_RHO_RE = re.compile(r"^rho([12])\(\s*([0-9.eE+-]+)\s*\)$")


def _pair_product(labels_text: str, topology: network.NetworkTopology) -> StabilizerGroup:
    """One pair-state label per source, '*'-joined, e.g. 'phi+*psi-'."""
    labels = [t.strip() for t in labels_text.split("*")]
    if len(labels) != len(topology.sources):
        raise ValueError(f"need one pair label per source, got {labels_text!r}")
    groups = []
    for s, label in zip(topology.sources, labels):
        if s.kind != network.BELL:
            raise ValueError("pair-state products need pair sources only")
        if label not in PAIR_SIGNS:
            raise ValueError(f"unknown pair state {label!r}")
        zs, xs = PAIR_SIGNS[label]
        groups.append(bell_pair(*s.qubits, topology.n_qubits, zs, xs))
    return product_group(groups)


def parse_state_spec(text: str, topology: network.NetworkTopology) -> State:
    """Resolve a state selector string against a topology.

    Grammar: ``product`` (default source states), ``mixed`` (maximally mixed),
    ``smolin`` (two pair sources only), ``mix(q, A, B)`` with A and B
    '*'-joined pair labels, and the shortcuts ``rho1(q)`` / ``rho2(q)`` for
    mix(q, phi+*phi+, psi-*psi-) and mix(q, phi+*phi+, psi+*psi+).
    """
    spec = text.strip().lower()
    if spec in ("product", "bell", "natural", "default"):
        return network_state(topology)
    if spec in ("mixed", "maximally-mixed"):
        return maximally_mixed(topology.n_qubits)
    if spec == "smolin":
        pair_sources = [s for s in topology.sources if s.kind == network.BELL]
        if len(pair_sources) != 2 or topology.n_qubits != 4:
            raise ValueError("smolin needs a two-pair-source, four-qubit network")
        (i, j), (k, l) = pair_sources[0].qubits, pair_sources[1].qubits
        return smolin(i, j, k, l, topology.n_qubits)
    m = _RHO_RE.match(spec)
    if m:
        which, q = m.group(1), float(m.group(2))
        second = "psi-*psi-" if which == "1" else "psi+*psi+"
        spec = f"mix({q}, phi+*phi+, {second})"
    m = _MIX_RE.match(spec)
    if m:
        q = float(m.group(1))
        return two_component_mixture(
            q, _pair_product(m.group(2), topology), _pair_product(m.group(3), topology))
    raise ValueError(f"unknown state spec {text!r}")
