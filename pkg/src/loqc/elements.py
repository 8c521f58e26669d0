"""Beamsplitter elements and circuits, with an asymmetric phase convention.

Every beamsplitter here is real: one face of the splitter (the "grey"
port) reflects with amplitude -sqrt(eta), the other face with +sqrt(eta),
and both transmissions are +sqrt(1 - eta). Writing r = sqrt(eta) and
t = sqrt(1 - eta), the 2x2 amplitude matrix with the grey port second is

    [[ r,  t],
     [ t, -r]]

which is symmetric, orthogonal and involutory. Because of the symmetry the
same matrix serves as the Heisenberg map on mode operators and as the
single-photon amplitude map (outputs indexed by rows, inputs by columns).
Which port is grey matters: it decides which interference terms pick up a
sign, and the gate constructions depend on those choices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .postselect import DetectionPattern


def beamsplitter_matrix(reflectivity: float, grey_port: int) -> np.ndarray:
    """2x2 real amplitude matrix of a beamsplitter.

    ``grey_port`` is 0 or 1 and selects which diagonal entry carries
    -sqrt(reflectivity).
    """
    if not 0.0 <= reflectivity <= 1.0:
        raise ValueError(f"reflectivity {reflectivity} outside [0, 1]")
    if grey_port not in (0, 1):
        raise ValueError(f"grey_port must be 0 or 1, got {grey_port}")
    r = math.sqrt(reflectivity)
    t = math.sqrt(1.0 - reflectivity)
    m = np.array([[r, t], [t, -r]])
    if grey_port == 0:
        m = np.array([[-r, t], [t, r]])
    return m


@dataclass(frozen=True)
class Beamsplitter:
    """A beamsplitter acting on two modes of a larger circuit.

    ``grey`` must equal ``mode_a`` or ``mode_b`` and names the mode whose
    reflection is sign-flipped. Construction is permissive so that
    circuits read from files can be inspected; ``validate_circuit``
    reports violations and ``matrix`` refuses to evaluate them.
    """

    mode_a: int
    mode_b: int
    reflectivity: float
    grey: int
    label: str = ""

    def grey_port(self) -> int:
        if self.grey == self.mode_a:
            return 0
        if self.grey == self.mode_b:
            return 1
        raise ValueError(
            f"grey mode {self.grey} is neither mode {self.mode_a} nor "
            f"mode {self.mode_b}"
        )

    def matrix(self) -> np.ndarray:
        if self.mode_a == self.mode_b:
            raise ValueError(f"beamsplitter modes coincide: {self.mode_a}")
        return beamsplitter_matrix(self.reflectivity, self.grey_port())


@dataclass(frozen=True)
class Circuit:
    """An ordered sequence of beamsplitters over ``n_modes`` labeled modes.

    ``ancilla_prep`` maps ancilla mode index -> photons fed in (zero
    entries mark vacuum ancillas that are still ancillas, not user
    inputs). ``detection`` is the heralding pattern for postselected
    gates. ``cuts`` names inspection points: ``cuts[name] = k`` means the
    state after the first k elements.
    """

    n_modes: int
    labels: tuple[str, ...]
    elements: tuple[Beamsplitter, ...]
    ancilla_prep: dict[int, int] = field(default_factory=dict)
    detection: DetectionPattern | None = None
    cuts: dict[str, int] = field(default_factory=dict)

    def mode_index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(
                f"no mode labeled {label!r}; have {list(self.labels)}"
            ) from None

    def user_modes(self) -> tuple[int, ...]:
        return tuple(m for m in range(self.n_modes) if m not in self.ancilla_prep)


@dataclass
class ValidationReport:
    valid: bool
    issues: list[str]


def validate_circuit(circuit: Circuit) -> ValidationReport:
    """Check structural consistency; returns a report instead of raising."""
    issues: list[str] = []
    n = circuit.n_modes
    if n < 1:
        issues.append(f"n_modes must be >= 1, got {n}")
    if len(circuit.labels) != n:
        issues.append(
            f"{len(circuit.labels)} labels for {n} modes"
        )
    if len(set(circuit.labels)) != len(circuit.labels):
        issues.append("mode labels are not unique")
    for i, el in enumerate(circuit.elements):
        where = f"element {i}" + (f" ({el.label})" if el.label else "")
        for m in (el.mode_a, el.mode_b):
            if m < 0 or m >= n:
                issues.append(f"{where}: mode {m} outside 0..{n - 1}")
        if el.mode_a == el.mode_b:
            issues.append(f"{where}: modes coincide ({el.mode_a})")
        if el.grey not in (el.mode_a, el.mode_b):
            issues.append(
                f"{where}: grey mode {el.grey} is not one of its modes"
            )
        if not 0.0 <= el.reflectivity <= 1.0:
            issues.append(
                f"{where}: reflectivity {el.reflectivity} outside [0, 1]"
            )
    for m, k in circuit.ancilla_prep.items():
        if m < 0 or m >= n:
            issues.append(f"ancilla prep mode {m} outside 0..{n - 1}")
        if k < 0:
            issues.append(f"ancilla prep count {k} on mode {m} is negative")
    if circuit.detection is not None:
        try:
            circuit.detection.validate_for(n)
        except ValueError as exc:
            issues.append(str(exc))
    for name, k in circuit.cuts.items():
        if k < 0 or k > len(circuit.elements):
            issues.append(f"cut {name!r} at {k} outside 0..{len(circuit.elements)}")
    return ValidationReport(valid=not issues, issues=issues)


def compose_transfer_matrix(circuit: Circuit, upto: int | None = None) -> np.ndarray:
    """Single-photon transfer matrix of the first ``upto`` elements.

    Rows index outputs and columns inputs, so for elements applied in
    circuit order c1 then c2 the result is U(c2) @ U(c1). Returned
    complex even though every in-scope element is real.
    """
    u = np.eye(circuit.n_modes, dtype=complex)
    for el in circuit.elements[:upto]:
        block = el.matrix()
        e = np.eye(circuit.n_modes, dtype=complex)
        a, b = el.mode_a, el.mode_b
        e[a, a] = block[0, 0]
        e[a, b] = block[0, 1]
        e[b, a] = block[1, 0]
        e[b, b] = block[1, 1]
        u = e @ u
    return u
