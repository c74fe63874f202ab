"""Weighted geometric means and iterated mean programs.

A :class:`MeanProgram` is a straight-line program over registers: ``Load``
copies a family member into a new register and ``Geo`` combines two
earlier registers with a weighted geometric mean. Every such program is a
family of continuous geometric means (closed under composition), and on
scalars it reduces to ``exp(sum_y w_y ln sigma(y))`` with the weights
returned by :meth:`MeanProgram.effective_weights`.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, DomainError, MalformedProgram, NotCommuting
from .families import FiniteMeasure


def geometric_mean(a, b, gamma: float) -> np.ndarray:
    """Weighted geometric mean ``A #_gamma B = A^1/2 (A^-1/2 B A^-1/2)^gamma A^1/2``.

    ``A`` must be positive definite. ``B`` may be positive semidefinite,
    in which case the result is too.
    """
    if not 0.0 <= gamma <= 1.0:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    a = la.as_hermitian(a)
    b = la.as_hermitian(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    w, v = la.eig(a)
    if w[0] <= la.TOL_PSD:
        raise DomainError(f"first argument is not positive definite (min eigenvalue {w[0]:.3e})")
    if gamma == 0.0:
        return a
    a_half = (v * np.sqrt(w)) @ v.conj().T
    a_mhalf = (v / np.sqrt(w)) @ v.conj().T
    inner = a_mhalf @ b @ a_mhalf
    out = a_half @ la.mpow(inner, gamma) @ a_half
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class Load:
    label: str


@dataclass(frozen=True)
class Geo:
    a: int
    b: int
    gamma: float


Step = Union[Load, Geo]


@dataclass(frozen=True)
class MeanProgram:
    """Single-assignment program of ``Load``/``Geo`` steps; the last register is the output."""

    steps: tuple

    def __post_init__(self):
        if not self.steps:
            raise MalformedProgram("program has no steps")
        for i, st in enumerate(self.steps):
            if isinstance(st, Load):
                continue
            if not isinstance(st, Geo):
                raise MalformedProgram(f"step {i} is neither Load nor Geo")
            if not (0 <= st.a < i and 0 <= st.b < i):
                raise MalformedProgram(f"step {i} references a register that is not yet defined")
            if not 0.0 <= st.gamma <= 1.0:
                raise MalformedProgram(f"step {i} has gamma {st.gamma} outside [0, 1]")

    @classmethod
    def load(cls, label) -> "MeanProgram":
        return cls((Load(str(label)),))

    @classmethod
    def geo(cls, left: "MeanProgram", right: "MeanProgram", gamma: float) -> "MeanProgram":
        """Program computing ``left #_gamma right``."""
        shift = len(left.steps)
        moved = []
        for st in right.steps:
            if isinstance(st, Geo):
                st = Geo(st.a + shift, st.b + shift, st.gamma)
            moved.append(st)
        steps = (*left.steps, *moved, Geo(shift - 1, shift + len(right.steps) - 1, float(gamma)))
        return cls(steps)

    def labels(self) -> set:
        return {st.label for st in self.steps if isinstance(st, Load)}

    def effective_weights(self) -> dict:
        """Scalar weights ``w_y`` (summing to 1) of the program on commuting input."""
        regs: list = []
        for st in self.steps:
            if isinstance(st, Load):
                regs.append({st.label: 1.0})
            else:
                wa, wb = regs[st.a], regs[st.b]
                out = {k: (1.0 - st.gamma) * v for k, v in wa.items()}
                for k, v in wb.items():
                    out[k] = out.get(k, 0.0) + st.gamma * v
                regs.append(out)
        return {k: v for k, v in regs[-1].items() if v != 0.0}

    def evaluate(self, sigma: Mapping[str, np.ndarray]) -> np.ndarray:
        regs: list = []
        for st in self.steps:
            if isinstance(st, Load):
                if st.label not in sigma:
                    raise MalformedProgram(f"label {st.label!r} is not in the family")
                regs.append(la.as_hermitian(sigma[st.label]))
            else:
                regs.append(geometric_mean(regs[st.a], regs[st.b], st.gamma))
        return regs[-1]

    def to_json(self) -> list:
        out = []
        for st in self.steps:
            if isinstance(st, Load):
                out.append({"load": st.label})
            else:
                out.append({"geo": [st.a, st.b, st.gamma]})
        return out

    @classmethod
    def from_json(cls, data) -> "MeanProgram":
        if isinstance(data, str):
            data = json.loads(data)
        steps = []
        try:
            for item in data:
                if "load" in item:
                    steps.append(Load(str(item["load"])))
                elif "geo" in item:
                    a, b, g = item["geo"]
                    steps.append(Geo(int(a), int(b), float(g)))
                else:
                    raise MalformedProgram(f"unknown step {item!r}")
        except (TypeError, ValueError, KeyError) as exc:
            if isinstance(exc, MalformedProgram):
                raise
            raise MalformedProgram(f"cannot parse program: {exc}") from exc
        return cls(tuple(steps))

    def describe(self) -> str:
        exprs: list = []
        for st in self.steps:
            if isinstance(st, Load):
                exprs.append(st.label)
            else:
                exprs.append(f"({exprs[st.a]} #{st.gamma:g} {exprs[st.b]})")
        return exprs[-1]


def eval_mean_program(program: MeanProgram, sigma: Mapping[str, np.ndarray]) -> np.ndarray:
    return program.evaluate(sigma)


def enumerate_programs(labels: Sequence[str], depth: int = 2,
                       gammas: Sequence[float] = (0.25, 0.5, 0.75),
                       max_programs: int | None = None) -> list:
    """Mean programs up to ``depth`` nested binary means.

    Depth 0 gives the loads; depth 1 adds ``y1 #g y2`` for ordered pairs of
    distinct labels; depth 2 adds ``(y1 #g y2) #h y3`` and ``y3 #h (y1 #g y2)``.
    Weights 0 and 1 are skipped since they reproduce an argument. The order
    is deterministic; ``max_programs`` truncates it.
    """
    gammas = [g for g in gammas if 0.0 < g < 1.0]
    loads = [MeanProgram.load(y) for y in labels]
    out = list(loads)
    level1 = []
    if depth >= 1:
        for (ya, yb) in itertools.permutations(labels, 2):
            for g in gammas:
                level1.append(MeanProgram.geo(MeanProgram.load(ya), MeanProgram.load(yb), g))
        out.extend(level1)
    if depth >= 2:
        for prog in level1:
            used = prog.labels()
            for yc in labels:
                if yc in used:
                    continue
                for h in gammas:
                    out.append(MeanProgram.geo(prog, MeanProgram.load(yc), h))
                    out.append(MeanProgram.geo(MeanProgram.load(yc), prog, h))
    if max_programs is not None:
        out = out[:max_programs]
    return out


def commuting_log_mean(sigma: Mapping[str, np.ndarray], gamma: FiniteMeasure | Mapping[str, float],
                       check_commute: float = 1e-8) -> np.ndarray:
    """``exp(sum_y gamma(y) ln sigma(y))`` for a pairwise commuting family.

    Evaluated in a simultaneous eigenbasis of the members in the support of
    ``gamma``.
    """
    if not isinstance(gamma, FiniteMeasure):
        gamma = FiniteMeasure.from_dict(gamma)
    if not gamma.is_probability(1e-9):
        raise DomainError(f"gamma must be a probability measure (mass {gamma.mass})")
    labels = list(gamma.support)
    missing = [y for y in labels if y not in sigma]
    if missing:
        raise MalformedProgram(f"labels {missing} are not in the family")
    mats = [la.as_hermitian(sigma[y]) for y in labels]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = la.commutator_norm(mats[i], mats[j])
            if c > check_commute:
                raise NotCommuting(
                    f"sigma({labels[i]}) and sigma({labels[j]}) do not commute "
                    f"(||[.,.]|| = {c:.3e})", pair=(labels[i], labels[j]), norm=c)
    u, diags = la.joint_diagonalize(mats, tol=max(check_commute, 1e-8))
    logs = np.zeros(mats[0].shape[0])
    for (_, w), d in zip(gamma.items, diags):
        if np.any(d <= la.TOL_PSD):
            raise DomainError("family member is not positive definite")
        logs += w * np.log(d)
    out = (u * np.exp(logs)) @ u.conj().T
    return 0.5 * (out + out.conj().T)
