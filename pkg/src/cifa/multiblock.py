"""Multi-block data model, validation and seeded synthetic data.

Random numbers come from numpy's Philox4x64 counter-based generator.  Every
stream is keyed by a tuple ``(seed, *path)`` hashed through ``SeedSequence``,
so e.g. block ``n`` of a synthetic draw always uses ``(seed, 1, n)``
regardless of how many blocks are generated or in what order.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidSpec, NonFinite, TooFewBlocks, ZeroSignal
from .linalg import orthonormal_columns


def make_rng(seed, *path):
    """Philox generator for the stream identified by ``(seed, *path)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, path)])))


def derive_seed(seed, *path):
    """A child 64-bit seed, for APIs that take a plain integer seed."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1, np.uint64)[0])


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MultiBlock:
    """An ordered collection of ``N >= 2`` real matrices sharing their row count."""

    blocks: tuple

    @property
    def shared_rows(self):
        return self.blocks[0].shape[0]

    @property
    def n_blocks(self):
        return len(self.blocks)

    @property
    def cols(self):
        return [b.shape[1] for b in self.blocks]

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __getitem__(self, i):
        return self.blocks[i]


def check_block(block):
    block = np.asarray(block, dtype=float)
    if block.ndim != 2 or block.shape[0] < 1 or block.shape[1] < 1:
        raise DimensionMismatch(f"expected a non-empty 2-D matrix, got shape {block.shape}")
    if not np.all(np.isfinite(block)):
        raise NonFinite("matrix contains NaN or Inf")
    return block


def validate(blocks):
    """Check a list of matrices and wrap it as a :class:`MultiBlock`.

    Raises
    ------
    TooFewBlocks
        Fewer than two blocks.
    DimensionMismatch
        Row counts differ, or a block is not a non-empty 2-D matrix.
    NonFinite
        Some entry is NaN or infinite.
    """
    if isinstance(blocks, MultiBlock):
        return blocks
    blocks = [check_block(b) for b in blocks]
    if len(blocks) < 2:
        raise TooFewBlocks(f"need at least 2 blocks, got {len(blocks)}")
    rows = {b.shape[0] for b in blocks}
    if len(rows) != 1:
        raise DimensionMismatch(f"blocks have different row counts: {sorted(rows)}")
    return MultiBlock(tuple(_frozen(b) for b in blocks))


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the linked low-rank generator.

    ``sources`` selects how the common basis is drawn: ``"gaussian"``
    orthonormalizes a Gaussian matrix, ``"periodic"`` orthonormalizes the
    deterministic waveforms of :func:`periodic_sources` (kept in the truth).
    """

    I: int
    J: Sequence[int]
    c: int
    R: Sequence[int]
    snr_db: Optional[float] = None
    seed: int = 0
    sources: str = "gaussian"

    def check(self):
        if self.I < 1:
            raise InvalidSpec("I must be >= 1")
        if len(self.J) != len(self.R):
            raise InvalidSpec("J and R must have one entry per block")
        if len(self.J) < 2:
            raise InvalidSpec("need at least 2 blocks (len(J) >= 2)")
        if self.c < 0:
            raise InvalidSpec("c must be >= 0")
        if self.c > min(self.R):
            raise InvalidSpec(f"c <= min(R) violated: c={self.c}, min(R)={min(self.R)}")
        for n, (j, r) in enumerate(zip(self.J, self.R)):
            if r < 1 or r > min(self.I - 1, j):
                raise InvalidSpec(f"R_n <= min(I-1, J_n) violated for block {n}: R={r}, I={self.I}, J={j}")
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise InvalidSpec("snr_db must be finite or None")
        if self.sources not in ("gaussian", "periodic"):
            raise InvalidSpec(f"unknown sources kind {self.sources!r}")
        if self.seed < 0:
            raise InvalidSpec("seed must be unsigned")


@dataclass(frozen=True)
class GroundTruth:
    common_basis: np.ndarray
    individual_bases: tuple
    mixings: tuple
    common_sources: Optional[np.ndarray] = None
    signals: tuple = field(default=(), repr=False)


def periodic_sources(n_samples, count):
    """Deterministic periodic test signals, one per column.

    The first four are a sine, a square wave, a sawtooth and an
    amplitude-modulated sine; further columns repeat the pattern with
    shifted periods.  Every column is centred and scaled to unit variance.
    """
    t = np.arange(n_samples, dtype=float)
    cols = []
    for k in range(count):
        shift = 1.0 + 0.37 * (k // 4)
        kind = k % 4
        if kind == 0:
            s = np.sin(2 * np.pi * t / (5.3 * shift))
        elif kind == 1:
            s = np.sign(np.sin(2 * np.pi * t / (61.0 * shift)) + 1e-12)
        elif kind == 2:
            s = 2.0 * ((t / (23.0 * shift)) % 1.0) - 1.0
        else:
            s = (1.0 + 0.6 * np.sin(2 * np.pi * t / (97.0 * shift))) * np.sin(2 * np.pi * t / (3.1 * shift))
        s = s - s.mean()
        cols.append(s / s.std())
    return np.column_stack(cols) if cols else np.zeros((n_samples, 0))


def add_noise(block, snr_db, seed):
    """Add white Gaussian noise at exactly ``snr_db``.

    The noise matrix is drawn first and then rescaled so that
    ``10 log10(||block||^2 / ||E||^2)`` equals ``snr_db`` to round-off.
    """
    block = check_block(block)
    if not np.isfinite(snr_db):
        raise NonFinite("snr_db must be finite")
    power = np.linalg.norm(block)
    if power == 0:
        raise ZeroSignal("SNR is undefined for an all-zero block")
    noise = make_rng(seed).standard_normal(block.shape)
    noise *= power / (np.linalg.norm(noise) * 10 ** (snr_db / 20.0))
    return block + noise


def generate_synthetic(spec):
    """Draw a linked multi-block data set ``Y_n = [A_bar A_n] B_n^T (+ noise)``.

    The common basis ``A_bar`` is orthonormal; each individual basis is a
    Gaussian draw deflated against ``A_bar`` and then orthonormalized, so the
    model's orthogonality assumptions hold exactly.  Mixing entries are i.i.d.
    standard normal.

    Returns
    -------
    (MultiBlock, GroundTruth)
    """
    spec.check()
    I, c = spec.I, spec.c
    if spec.sources == "periodic":
        sources = periodic_sources(I, c)
        a_bar = orthonormal_columns(sources) if c else np.zeros((I, 0))
    else:
        sources = None
        a_bar = orthonormal_columns(make_rng(spec.seed, 0).standard_normal((I, c))) if c else np.zeros((I, 0))

    blocks, individual, mixings, signals = [], [], [], []
    for n, (j, r) in enumerate(zip(spec.J, spec.R)):
        rng = make_rng(spec.seed, 1, n)
        g = rng.standard_normal((I, r - c))
        for _ in range(2):
            g = g - a_bar @ (a_bar.T @ g)
            g = orthonormal_columns(g) if g.shape[1] else g
        b = rng.standard_normal((j, r))
        y = np.hstack([a_bar, g]) @ b.T
        signals.append(_frozen(y))
        if spec.snr_db is not None:
            y = add_noise(y, spec.snr_db, derive_seed(spec.seed, 2, n))
        blocks.append(y)
        individual.append(_frozen(g))
        mixings.append(_frozen(b))

    truth = GroundTruth(
        common_basis=_frozen(a_bar),
        individual_bases=tuple(individual),
        mixings=tuple(mixings),
        common_sources=None if sources is None else _frozen(sources),
        signals=tuple(signals),
    )
    return validate(blocks), truth


@dataclass(frozen=True)
class LinkedBssScenario:
    data: MultiBlock
    sources: np.ndarray
    mixings: tuple


def linked_bss_scenario(I=1000, n_blocks=10, J=50, n_common=4, n_individual=6, snr_db=20.0, seed=0):
    """Linked blind-source-separation benchmark data.

    Each block is ``Y_n = [S, G_n] B_n^T + E_n`` with ``S`` the shared
    periodic sources, ``G_n`` i.i.d. standard normal individual components
    and ``B_n`` (``J x (n_common + n_individual)``) standard normal mixing.
    Unlike :func:`generate_synthetic` nothing is orthogonalized.
    """
    sources = periodic_sources(I, n_common)
    blocks, mixings = [], []
    for n in range(n_blocks):
        rng = make_rng(seed, 1, n)
        g = rng.standard_normal((I, n_individual))
        b = rng.standard_normal((J, n_common + n_individual))
        y = np.hstack([sources, g]) @ b.T
        if snr_db is not None:
            y = add_noise(y, snr_db, derive_seed(seed, 2, n))
        blocks.append(y)
        mixings.append(_frozen(b))
    return LinkedBssScenario(validate(blocks), _frozen(sources), tuple(mixings))
