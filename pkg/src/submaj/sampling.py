"""Random instances for property tests, the selftest and benchmarks."""
from __future__ import annotations

import numpy as np

from .families import FamilyPair, classical_pair


def rng_from(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_hermitian(rng, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (g + g.conj().T)


def random_pd(rng, d: int, min_eig: float = 0.05, trace: float | None = None) -> np.ndarray:
    """Random positive definite matrix with smallest eigenvalue at least ``min_eig`` before scaling."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    a = g @ g.conj().T / d + min_eig * np.eye(d)
    if trace is not None:
        a *= trace / np.trace(a).real
    return 0.5 * (a + a.conj().T)


def random_density(rng, d: int, min_eig: float = 0.05) -> np.ndarray:
    return random_pd(rng, d, min_eig, trace=1.0)


def random_unitary(rng, d: int) -> np.ndarray:
    """Haar-distributed unitary (QR with phase correction)."""
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_isometry(rng, d_in: int, d_out: int) -> np.ndarray:
    return random_unitary(rng, d_out)[:, :d_in]


def random_kraus(rng, d_in: int, d_out: int, n_kraus: int | None = None, contraction: float = 1.0) -> list:
    """Kraus operators of a random channel (trace preserving when ``contraction == 1``)."""
    n_kraus = n_kraus or d_in * d_out
    v = random_isometry(rng, d_in, d_out * n_kraus)
    ks = [np.sqrt(contraction) * v[k * d_out:(k + 1) * d_out, :] for k in range(n_kraus)]
    return ks


def apply_kraus(kraus, a) -> np.ndarray:
    out = sum(k @ a @ k.conj().T for k in kraus)
    return 0.5 * (out + out.conj().T)


def random_stinespring_channel(rng, d: int = 2, env: int = 2):
    """CPTP map ``A -> Tr_env V A V*`` with a random isometry ``V: C^d -> C^d (x) C^env``."""
    v = random_isometry(rng, d, d * env)

    def channel(a):
        big = v @ np.asarray(a) @ v.conj().T
        out = np.einsum("iaja->ij", big.reshape(d, env, d, env))
        return 0.5 * (out + out.conj().T)

    return channel


def random_substochastic(rng, d_out: int, d_in: int, min_entry: float = 1e-3) -> np.ndarray:
    """Entrywise positive matrix with column sums in ``(0, 1]``."""
    t = rng.uniform(min_entry, 1.0, size=(d_out, d_in))
    t /= t.sum(axis=0, keepdims=True)
    return t * rng.uniform(0.5, 1.0, size=(1, d_in))


def random_prob(rng, d: int, floor: float = 0.02) -> np.ndarray:
    p = rng.dirichlet(np.ones(d)) + floor
    return p / p.sum()


def random_classical_pair(rng, d: int | None = None, nx: int | None = None, ny: int | None = None,
                          max_dim: int = 4, max_labels: int = 3) -> FamilyPair:
    """Diagonal pair with positive entries in ``[0.05, 1]`` and labels ``x0.., y0..``."""
    d = d or int(rng.integers(1, max_dim + 1))
    nx = nx or int(rng.integers(1, max_labels + 1))
    ny = ny or int(rng.integers(1, max_labels + 1))
    p = rng.uniform(0.05, 1.0, size=(d, nx))
    q = rng.uniform(0.05, 1.0, size=(d, ny))
    return classical_pair(p, q)


def random_quantum_pair(rng, d: int, nx: int = 1, ny: int = 1, trace: float | None = None) -> FamilyPair:
    rho = {f"x{i}": random_pd(rng, d, trace=trace) for i in range(nx)}
    sigma = {f"y{j}": random_pd(rng, d, trace=trace) for j in range(ny)}
    return FamilyPair.build(rho, sigma)
