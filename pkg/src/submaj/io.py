"""JSON and CSV input/output.

Matrices are nested lists of ``[re, im]`` pairs. Floats are written with
``repr`` precision, so a load/dump cycle reproduces them exactly.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Any

import numpy as np

from .errors import ParseError
from .families import FamilyPair
from .feasibility import equivariance_constraints_from_group, u1_constraint


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _number(v, where):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}: expected a number, got {v!r}")
    return float(v)


def matrix_from_json(data, where: str = "matrix") -> np.ndarray:
    """Inverse of :func:`matrix_to_json`; plain real entries are accepted too."""
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ParseError(f"{where}: expected a nonempty list of rows")
    n = len(data)
    out = np.zeros((n, n), dtype=np.complex128)
    for i, row in enumerate(data):
        if len(row) != n:
            raise ParseError(f"{where}: row {i} has {len(row)} entries, expected {n}")
        for j, z in enumerate(row):
            if isinstance(z, list):
                if len(z) != 2:
                    raise ParseError(f"{where}[{i}][{j}]: expected [re, im]")
                out[i, j] = complex(_number(z[0], where), _number(z[1], where))
            else:
                out[i, j] = _number(z, f"{where}[{i}][{j}]")
    return out


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}", line=exc.lineno,
                         column=exc.colno) from exc


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return loads(text, str(path))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True) + "\n"


def write_atomic(path, text: str):
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".submaj-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def family_to_json(P: FamilyPair) -> dict:
    return {"dim": P.dim, "X": list(P.X), "Y": list(P.Y),
            "rho": {x: matrix_to_json(P.rho[x]) for x in P.X},
            "sigma": {y: matrix_to_json(P.sigma[y]) for y in P.Y}}


def family_from_json(data, source: str = "family") -> FamilyPair:
    if not isinstance(data, dict):
        raise ParseError(f"{source}: expected an object")
    for key in ("rho", "sigma"):
        if not isinstance(data.get(key), dict):
            raise ParseError(f"{source}: missing object {key!r}")
    X = data.get("X", list(data["rho"]))
    Y = data.get("Y", list(data["sigma"]))
    if sorted(map(str, X)) != sorted(data["rho"]) or sorted(map(str, Y)) != sorted(data["sigma"]):
        raise ParseError(f"{source}: label lists do not match the rho/sigma keys")
    rho = {str(x): matrix_from_json(data["rho"][str(x)], f"{source}.rho[{x}]") for x in X}
    sigma = {str(y): matrix_from_json(data["sigma"][str(y)], f"{source}.sigma[{y}]") for y in Y}
    P = FamilyPair.build(rho, sigma)
    if "dim" in data and int(data["dim"]) != P.dim:
        raise ParseError(f"{source}: dim {data['dim']} does not match matrices of size {P.dim}")
    return P


def load_family(path) -> FamilyPair:
    return family_from_json(load_json(path), str(path))


def group_constraints_from_json(data, source: str = "group") -> list:
    """Equivariance generators from ``{"unitaries_in", "unitaries_out"}``,
    ``{"unitaries"}`` (same on both sides) or ``{"hamiltonian_in", "hamiltonian_out"}``."""
    if not isinstance(data, dict):
        raise ParseError(f"{source}: expected an object")
    if "hamiltonian_in" in data or "hamiltonian" in data:
        h_in = matrix_from_json(data.get("hamiltonian_in", data.get("hamiltonian")), f"{source}.hamiltonian_in")
        h_out = matrix_from_json(data.get("hamiltonian_out", data.get("hamiltonian")), f"{source}.hamiltonian_out")
        return u1_constraint(h_in, h_out)
    if "unitaries" in data:
        us = [matrix_from_json(u, f"{source}.unitaries[{k}]") for k, u in enumerate(data["unitaries"])]
        return equivariance_constraints_from_group(us, us)
    if "unitaries_in" in data and "unitaries_out" in data:
        uin = [matrix_from_json(u, f"{source}.unitaries_in[{k}]") for k, u in enumerate(data["unitaries_in"])]
        uout = [matrix_from_json(u, f"{source}.unitaries_out[{k}]") for k, u in enumerate(data["unitaries_out"])]
        return equivariance_constraints_from_group(uin, uout)
    raise ParseError(f"{source}: no unitaries or hamiltonians given")


def gibbs_from_json(data, source: str = "gibbs"):
    """A single matrix, ``{"gibbs": M}`` or ``{"gibbs_in": M, "gibbs_out": M'}``."""
    if isinstance(data, list):
        return matrix_from_json(data, source)
    if isinstance(data, dict):
        if "gibbs" in data:
            return matrix_from_json(data["gibbs"], f"{source}.gibbs")
        if "gibbs_in" in data and "gibbs_out" in data:
            return (matrix_from_json(data["gibbs_in"], f"{source}.gibbs_in"),
                    matrix_from_json(data["gibbs_out"], f"{source}.gibbs_out"))
    raise ParseError(f"{source}: expected a matrix or a gibbs object")


def exponent_query_from_json(data, source: str = "query"):
    from .applications import ExponentQuery

    if not isinstance(data, dict):
        raise ParseError(f"{source}: expected an object")
    try:
        group = [matrix_from_json(u, f"{source}.group[{k}]") for k, u in enumerate(data["group"])]
        ref = data.get("group_ref")
        return ExponentQuery(
            r=_number(data["r"], f"{source}.r"),
            rho0=matrix_from_json(data["rho0"], f"{source}.rho0"),
            sigma0=matrix_from_json(data["sigma0"], f"{source}.sigma0"),
            group=group,
            kappa=_number(data.get("kappa", 0.0), f"{source}.kappa"),
            omega=matrix_from_json(data["omega"], f"{source}.omega") if "omega" in data else None,
            group_ref=[matrix_from_json(u, f"{source}.group_ref[{k}]") for k, u in enumerate(ref)]
            if ref is not None else None,
        )
    except KeyError as exc:
        raise ParseError(f"{source}: missing field {exc.args[0]!r}") from exc


def float_repr(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))
