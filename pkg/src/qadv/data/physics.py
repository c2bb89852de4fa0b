"""Physics datasets: QAH time-of-flight densities and transverse-field Ising ground states."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..dataset import Dataset
from ..errors import ConfigurationError, DegenerateParameterError

log = logging.getLogger(__name__)

GAP_TOL = 1e-8


# ---------------------------------------------------------------------------
# quantum anomalous Hall model


@dataclass
class QAHParams:
    """Spin-orbit strengths, hopping ``t``, Zeeman ``mu`` and lattice size."""

    j_so_x: float = 1.0
    j_so_y: float = 1.0
    t: float = 1.0
    mu: float = 1.0
    L: int = 10

    def __post_init__(self):
        if self.t <= 0:
            raise ConfigurationError("hopping t must be positive")
        if self.L < 4:
            raise ConfigurationError("lattice size L must be >= 4")


def bloch_hamiltonian(p: QAHParams, kx, ky):
    """2x2 Bloch Hamiltonians (spin up, down) on arrays of momenta."""
    kx, ky = np.broadcast_arrays(np.asarray(kx, float), np.asarray(ky, float))
    dx = -2.0 * p.j_so_y * np.sin(ky)
    dy = -2.0 * p.j_so_x * np.sin(kx)
    dz = p.mu - 2.0 * p.t * (np.cos(kx) + np.cos(ky))
    h = np.empty(kx.shape + (2, 2), dtype=complex)
    h[..., 0, 0] = dz
    h[..., 1, 1] = -dz
    h[..., 0, 1] = dx - 1j * dy
    h[..., 1, 0] = dx + 1j * dy
    return h


def chern_number(p: QAHParams, k_grid=24):
    """First Chern number of the lower band via plaquette link variables.

    Uses the orientation ``C = -(1/2pi) int F_xy`` with
    ``A = <u| i d |u>``, which gives ``C = -sign(mu)`` for ``0 < |mu| < 4t``.
    """
    k = 2 * np.pi * np.arange(k_grid) / k_grid
    kx, ky = np.meshgrid(k, k, indexing="ij")
    energies, vecs = np.linalg.eigh(bloch_hamiltonian(p, kx, ky))
    if np.min(energies[..., 1] - energies[..., 0]) < GAP_TOL:
        raise DegenerateParameterError(f"band gap closes for {p}")
    u = vecs[..., :, 0]

    def link(a, b):
        z = np.sum(np.conj(a) * b, axis=-1)
        return z / np.abs(z)

    ux = link(u, np.roll(u, -1, axis=0))
    uy = link(u, np.roll(u, -1, axis=1))
    plaquette = ux * np.roll(uy, -1, axis=0) * np.conj(np.roll(ux, -1, axis=1)) * np.conj(uy)
    flux = np.angle(plaquette).sum()
    # link phases accumulate -int F, so the sum is already -(2 pi) x (standard C)
    value = flux / (2 * np.pi)
    return int(np.rint(value))


def real_space_hamiltonian(p: QAHParams):
    """Open-boundary ``2 L^2`` single-particle matrix; index ``2 * (x * L + y) + spin``."""
    L = p.L
    n = L * L
    h = np.zeros((2 * n, 2 * n), dtype=complex)

    def idx(x, y, s):
        return 2 * (x * L + y) + s

    for x in range(L):
        for y in range(L):
            h[idx(x, y, 0), idx(x, y, 0)] += p.mu
            h[idx(x, y, 1), idx(x, y, 1)] -= p.mu
            for dx, dy, amp in ((1, 0, p.j_so_x), (0, 1, 1j * p.j_so_y)):
                for sign in (1, -1):
                    xx, yy = x + sign * dx, y + sign * dy
                    if not (0 <= xx < L and 0 <= yy < L):
                        continue
                    # amp * (c+_{r up} c_{r +- e, down}) with relative sign, plus h.c.
                    v = sign * amp
                    h[idx(x, y, 0), idx(xx, yy, 1)] += v
                    h[idx(xx, yy, 1), idx(x, y, 0)] += np.conj(v)
                    # spin-conserving hopping over ordered neighbour pairs
                    h[idx(x, y, 0), idx(xx, yy, 0)] -= p.t
                    h[idx(x, y, 1), idx(xx, yy, 1)] += p.t
    return h


def tof_densities(p: QAHParams):
    """Momentum-space densities ``(n_up(k), n_down(k))`` of the half-filled system.

    The lower half of the open-boundary single-particle spectrum is occupied;
    returns an array of length ``2 L^2`` (up block then down block, each
    row-major over ``(kx, ky)``).
    """
    L = p.L
    h = real_space_hamiltonian(p)
    energies, vecs = np.linalg.eigh(h)
    occ = vecs[:, : L * L]
    phi = occ.T.reshape(L * L, L, L, 2)
    amp = np.fft.fft2(phi, axes=(1, 2)) / L
    dens = np.sum(np.abs(amp) ** 2, axis=0)
    return np.concatenate([dens[..., 0].ravel(), dens[..., 1].ravel()])


def qah_label(p: QAHParams, k_grid=24):
    """Class 0 for trivial bands, 1 for ``|C| = 1``."""
    return int(abs(chern_number(p, k_grid)) == 1)


DEFAULT_QAH_RANGES = {"lam": (0.2, 1.0), "t": (0.05, 0.5), "mu": (1.0, 1.0)}


def generate_tof(count, ranges=None, L=10, seed=0, gap_margin=0.1, k_grid=24):
    """Random time-of-flight samples labelled by Chern class.

    ``ranges`` maps ``lam`` (``J_SO^x = J_SO^y``), ``t`` and ``mu`` to
    ``(low, high)`` uniform ranges. Draws too close to ``|mu| = 4t`` or
    ``mu = 0`` are skipped and logged.
    """
    ranges = {**DEFAULT_QAH_RANGES, **(ranges or {})}
    rng = np.random.default_rng(seed)
    feats, labels, params = [], [], []
    skipped = 0
    while len(labels) < count:
        lam = rng.uniform(*ranges["lam"])
        t = rng.uniform(*ranges["t"])
        mu = rng.uniform(*ranges["mu"])
        if abs(abs(mu) - 4 * t) < gap_margin or abs(mu) < gap_margin:
            skipped += 1
            continue
        p = QAHParams(lam, lam, t, mu, L)
        try:
            label = qah_label(p, k_grid)
        except DegenerateParameterError:
            skipped += 1
            continue
        feats.append(tof_densities(p))
        labels.append(label)
        params.append((lam, t, mu))
    if skipped:
        log.info("skipped %d near-gap-closing parameter draws", skipped)
    return Dataset(
        np.array(feats),
        np.array(labels),
        ("trivial", "chern"),
        np.array(params),
        ("lam", "t", "mu"),
        {"model": "qah", "L": L, "ranges": ranges, "seed": seed, "skipped": skipped},
    )


# ---------------------------------------------------------------------------
# transverse-field Ising chain


@dataclass
class IsingParams:
    L: int = 8
    jx: float = 1.0

    def __post_init__(self):
        if not 2 <= self.L <= 12:
            raise ConfigurationError("Ising chain length must be within 2..12")
        if self.jx < 0:
            raise ConfigurationError("transverse field must be non-negative")


def ising_hamiltonian(p: IsingParams):
    """Dense open-chain ``-sum Z_i Z_{i+1} - J_x sum X_i`` (qubit 0 = MSB)."""
    L = p.L
    dim = 1 << L
    basis = np.arange(dim)
    bits = (basis[:, None] >> (L - 1 - np.arange(L))[None, :]) & 1
    spins = 1 - 2 * bits
    h = np.zeros((dim, dim))
    h[basis, basis] = -np.sum(spins[:, :-1] * spins[:, 1:], axis=1)
    for i in range(L):
        h[basis, basis ^ (1 << (L - 1 - i))] -= p.jx
    return h


def ising_ground_state(p: IsingParams, return_energy=False):
    """Lowest eigenvector; phase fixed so the first nonzero amplitude is positive."""
    energies, vecs = np.linalg.eigh(ising_hamiltonian(p))
    psi = vecs[:, 0]
    first = np.flatnonzero(np.abs(psi) > 1e-12)[0]
    psi = psi * np.sign(psi[first])
    return (psi, energies[0]) if return_energy else psi


def ising_jx_grid(n, low=0.0, high=2.0, dead_zone=0.02, seed=None):
    """``n`` transverse fields on ``(low, high]`` avoiding ``|J_x - 1| < dead_zone``.

    Evenly spaced when ``seed`` is None, otherwise uniform random.
    """
    if seed is None:
        pool = np.linspace(low, high, 4 * n + 1)[1:]
        pool = pool[np.abs(pool - 1.0) >= dead_zone]
        pick = np.linspace(0, len(pool) - 1, n).round().astype(int)
        return pool[pick]
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        v = rng.uniform(low, high)
        if v > 0 and abs(v - 1.0) >= dead_zone:
            out.append(v)
    return np.array(out)


def generate_ising_dataset(L, jx_values, dead_zone=0.02):
    """Ground states labelled 0 (ferromagnetic, ``J_x < 1``) or 1 (paramagnetic)."""
    jx_values = np.asarray(jx_values, dtype=float)
    bad = (np.abs(jx_values - 1.0) < dead_zone) | (jx_values <= 0)
    if np.any(bad):
        raise ConfigurationError(f"J_x values {jx_values[bad][:5]} fall in the excluded zone")
    states = np.array([ising_ground_state(IsingParams(L, j)) for j in jx_values])
    labels = (jx_values > 1.0).astype(np.int64)
    return Dataset(
        states,
        labels,
        ("ferromagnetic", "paramagnetic"),
        jx_values[:, None],
        ("jx",),
        {"model": "ising", "L": L, "dead_zone": dead_zone},
    )
