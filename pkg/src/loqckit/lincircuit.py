"""Scattering-matrix algebra for feed-forward linear optical circuits.

Matrices are plain complex ``numpy`` arrays. Field convention is
``exp(-i omega t)``: a directional coupler with cross-over power fraction
``C`` has the symmetric matrix ``[[t, i c], [i c, t]]`` with ``t = sqrt(1-C)``
and ``c = sqrt(C)``, so light crossing over picks up a factor ``+i``.

A :class:`Netlist` is an ordered list of stages; each stage holds couplers and
phase shifts on disjoint modes. Compiling multiplies the stage matrices in
propagation order, ``S = S_last @ ... @ S_first``, so that
``a_out = S @ a_in`` and ``S[i, j]`` is the amplitude from input mode ``j``
to output mode ``i``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from loqckit.errors import DomainError, StructuralError

UNITARY_TOL = 1e-12

#: Mode order of :func:`cnot_netlist`.
CNOT_MODES = ("anc_a", "c1", "c0", "t1", "t0", "anc_b")
#: Logical ports of the CNOT circuit, in the order used for 4x4 matrices.
CNOT_LOGICAL = ("c1", "c0", "t1", "t0")


def unitarity_error(m: np.ndarray) -> float:
    """Return ``max |M^dagger M - I|``."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"unitarity needs a square matrix, got shape {m.shape}")
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_error(m) <= tol


def _check_finite(m: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(m)):
        raise DomainError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class CouplerSpec:
    """A directional coupler with cross-over power fraction ``C`` between two modes."""

    C: float
    mode_a: int
    mode_b: int

    def __post_init__(self):
        if not (0.0 <= self.C <= 1.0):
            raise DomainError(f"cross-over ratio must lie in [0, 1], got {self.C}")
        if self.mode_a == self.mode_b:
            raise StructuralError("coupler needs two distinct modes")

    @property
    def modes(self) -> tuple[int, int]:
        return (self.mode_a, self.mode_b)


@dataclass(frozen=True)
class PhaseShiftSpec:
    """Multiplies the field in ``mode`` by ``exp(i * phase)``."""

    mode: int
    phase: float

    def __post_init__(self):
        if not np.isfinite(self.phase):
            raise DomainError("phase must be finite")

    @property
    def modes(self) -> tuple[int]:
        return (self.mode,)


Element = Union[CouplerSpec, PhaseShiftSpec]


def coupler_matrix(spec: CouplerSpec | float) -> np.ndarray:
    """2x2 matrix ``[[t, ic], [ic, t]]`` of a coupler.

    Accepts a :class:`CouplerSpec` or a bare cross-over ratio.
    """
    C = spec.C if isinstance(spec, CouplerSpec) else float(spec)
    if not (0.0 <= C <= 1.0):
        raise DomainError(f"cross-over ratio must lie in [0, 1], got {C}")
    t = np.sqrt(1.0 - C)
    ic = 1j * np.sqrt(C)
    return np.array([[t, ic], [ic, t]], dtype=complex)


@dataclass(frozen=True)
class Netlist:
    """Stage-ordered circuit on ``n_modes`` waveguide modes.

    ``labels`` optionally names each mode (length ``n_modes``).
    """

    n_modes: int
    stages: tuple[tuple[Element, ...], ...] = ()
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        stages = tuple(tuple(stage) for stage in self.stages)
        object.__setattr__(self, "stages", stages)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))
        if self.n_modes < 1:
            raise StructuralError("netlist needs at least one mode")
        if self.labels is not None and len(self.labels) != self.n_modes:
            raise StructuralError(
                f"{len(self.labels)} labels given for {self.n_modes} modes")
        for k, stage in enumerate(stages):
            seen: set[int] = set()
            for el in stage:
                for m in el.modes:
                    if not (0 <= m < self.n_modes):
                        raise StructuralError(
                            f"stage {k}: mode {m} out of range for {self.n_modes} modes")
                    if m in seen:
                        raise StructuralError(f"stage {k}: mode {m} used twice")
                    seen.add(m)

    def mode(self, label: str) -> int:
        """Index of the mode called ``label``."""
        if self.labels is None or label not in self.labels:
            raise DomainError(f"unknown port label {label!r}")
        return self.labels.index(label)

    def compile(self) -> np.ndarray:
        return compile_netlist(self)

    def to_dict(self) -> dict:
        stages = []
        for stage in self.stages:
            out = []
            for el in stage:
                if isinstance(el, CouplerSpec):
                    out.append({"type": "coupler", "C": el.C, "a": el.mode_a, "b": el.mode_b})
                else:
                    out.append({"type": "phase", "mode": el.mode, "phi": el.phase})
            stages.append(out)
        return {
            "n_modes": self.n_modes,
            "labels": list(self.labels) if self.labels is not None else [],
            "stages": stages,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "Netlist":
        try:
            n = int(d["n_modes"])
            stages = []
            for stage in d.get("stages", []):
                els: list[Element] = []
                for e in stage:
                    kind = e.get("type")
                    if kind == "coupler":
                        els.append(CouplerSpec(float(e["C"]), int(e["a"]), int(e["b"])))
                    elif kind == "phase":
                        els.append(PhaseShiftSpec(int(e["mode"]), float(e["phi"])))
                    else:
                        raise StructuralError(f"unknown element type {kind!r}")
                stages.append(tuple(els))
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed netlist: {exc}") from exc
        labels = d.get("labels") or None
        return cls(n, tuple(stages), tuple(labels) if labels else None)

    @classmethod
    def from_json(cls, text: str) -> "Netlist":
        return cls.from_dict(json.loads(text))


def stage_matrix(n_modes: int, stage: Iterable[Element]) -> np.ndarray:
    """Identity embedding of one stage's 2x2 blocks and phase factors."""
    m = np.eye(n_modes, dtype=complex)
    seen: set[int] = set()
    for el in stage:
        if seen.intersection(el.modes):
            raise StructuralError("overlapping modes in a stage")
        seen.update(el.modes)
        if isinstance(el, CouplerSpec):
            idx = [el.mode_a, el.mode_b]
            m[np.ix_(idx, idx)] = coupler_matrix(el)
        else:
            m[el.mode, el.mode] = np.exp(1j * el.phase)
    return m


def compile_netlist(netlist: Netlist) -> np.ndarray:
    """Full ``n_modes x n_modes`` scattering matrix of ``netlist``."""
    s = np.eye(netlist.n_modes, dtype=complex)
    for stage in netlist.stages:
        s = stage_matrix(netlist.n_modes, stage) @ s
    return _check_finite(s)


def reduce_ports(s: np.ndarray, inputs: Sequence[int], outputs: Sequence[int]) -> np.ndarray:
    """Sub-matrix ``S'[a, b] = S[outputs[a], inputs[b]]``."""
    s = np.asarray(s)
    for name, idx, size in (("input", inputs, s.shape[1]), ("output", outputs, s.shape[0])):
        if len(set(idx)) != len(idx):
            raise DomainError(f"duplicate {name} index in {list(idx)}")
        for i in idx:
            if not (0 <= i < size):
                raise DomainError(f"{name} index {i} out of range for size {size}")
    return s[np.ix_(list(outputs), list(inputs))]


def cnot_netlist(c_half: float = 0.5, c_twothirds: float = 2.0 / 3.0) -> Netlist:
    """Six-mode post-selected CNOT: two half couplers around three 2/3 couplers.

    Mode order is ``(anc_a, c1, c0, t1, t0, anc_b)``. The 1/2 couplers on the
    target rails form a full-cross pair (a NOT on the target); the central
    2/3 coupler between ``c0`` and ``t1`` produces the two-photon interference,
    and the outer 2/3 couplers into the ancilla modes balance the amplitudes.
    """
    anc_a, c1, c0, t1, t0, anc_b = range(6)
    stages = (
        (CouplerSpec(c_half, t1, t0),),
        (
            CouplerSpec(c_twothirds, anc_a, c1),
            CouplerSpec(c_twothirds, c0, t1),
            CouplerSpec(c_twothirds, t0, anc_b),
        ),
        (CouplerSpec(c_half, t1, t0),),
    )
    return Netlist(6, stages, CNOT_MODES)


def cnot_logical_indices(netlist: Netlist | None = None) -> list[int]:
    nl = netlist if netlist is not None else cnot_netlist()
    return [nl.mode(p) for p in CNOT_LOGICAL]


def cnot_transmission(c_half: float = 0.5, c_twothirds: float = 2.0 / 3.0) -> np.ndarray:
    """Logical 4x4 power matrix ``|S'|^2``; rows are outputs, columns inputs."""
    nl = cnot_netlist(c_half, c_twothirds)
    idx = cnot_logical_indices(nl)
    return np.abs(reduce_ports(compile_netlist(nl), idx, idx)) ** 2
