"""
Signals, the radix-2 FFT engine and the aliasing machinery.

Signals are plain 1-D complex numpy arrays whose length is a power of two.
Sparse spectra are ``dict`` objects mapping a frequency index to its complex
coefficient.  The forward kernel is ``exp(-2j*pi*m*n/N)``; the inverse is the
conjugate kernel scaled by ``1/N``.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .errors import InvalidInputError


def is_pow2(n):
    return n >= 1 and (n & (n - 1)) == 0


def log2_exact(n):
    """Return ``m`` with ``n == 2**m``; raise for anything else."""
    n = int(n)
    if not is_pow2(n):
        raise InvalidInputError(f"length {n} is not a power of two")
    return n.bit_length() - 1


# ---------------------------------------------------------------------------
# operation accounting
# ---------------------------------------------------------------------------

@dataclass
class OpCount:
    """
    Arithmetic operation counters.

    ``adds``, ``mults`` and ``divs`` are the instrumented counts of complex
    operations actually performed.  ``paper_model`` accumulates the coarse
    cost model used for reporting (1.5 n log2 n per n-point FFT, 5 per 2x2
    solve, 6 m^2 per larger direct solve).
    """

    adds: int = 0
    mults: int = 0
    divs: int = 0
    paper_model: int = 0

    def count(self, adds=0, mults=0, divs=0):
        self.adds += int(adds)
        self.mults += int(mults)
        self.divs += int(divs)

    @property
    def total(self):
        return self.adds + self.mults + self.divs

    def __iadd__(self, other):
        self.adds += other.adds
        self.mults += other.mults
        self.divs += other.divs
        self.paper_model += other.paper_model
        return self

    def as_dict(self):
        return {
            "adds": self.adds,
            "mults": self.mults,
            "divs": self.divs,
            "total": self.total,
            "paper_model": self.paper_model,
        }


def fft_paper_cost(n):
    """Reporting cost of an n-point FFT: 1.5 n log2 n (12 for n=4)."""
    m = log2_exact(n)
    return (3 * n * m) // 2


def solve_paper_cost(m):
    """Reporting cost of an m x m solve: 1, 5 for the 2x2 case, else 6 m^2."""
    if m < 1:
        raise InvalidInputError("solve size must be positive")
    if m == 1:
        return 1
    if m == 2:
        return 5
    return 6 * m * m


def paper_cost_model(fft_size, solve_size):
    """Return the pair (FFT cost, solve cost) under the reporting model."""
    return fft_paper_cost(fft_size), solve_paper_cost(solve_size)


# ---------------------------------------------------------------------------
# support sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SupportSet:
    """Sorted set of known frequency indices inside Z_n."""

    indices: tuple
    n: int

    def __post_init__(self):
        log2_exact(self.n)
        idx = tuple(int(j) for j in self.indices)
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise InvalidInputError("support indices must be strictly increasing")
        if idx and (idx[0] < 0 or idx[-1] >= self.n):
            raise InvalidInputError(f"support indices must lie in [0, {self.n})")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_iterable(cls, indices, n):
        idx = [int(j) for j in indices]
        if len(set(idx)) != len(idx):
            raise InvalidInputError("support indices must be distinct")
        return cls(tuple(sorted(idx)), int(n))

    @property
    def k(self):
        return len(self.indices)

    @property
    def m_log2(self):
        return log2_exact(self.n)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, j):
        return j in set(self.indices)

    def as_array(self):
        return np.asarray(self.indices, dtype=np.int64)


# ---------------------------------------------------------------------------
# FFT
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def _twiddles(n):
    # exp(-2 pi i k / n) for k < n/2
    return np.exp(-2j * np.pi * np.arange(n // 2) / n)


@lru_cache(maxsize=64)
def _bit_reversal(n):
    m = log2_exact(n)
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(m):
        rev |= ((idx >> b) & 1) << (m - 1 - b)
    return rev


def fft_pow2(x, direction="forward", ops=None):
    """
    Iterative radix-2 decimation-in-time FFT over the last axis.

    Parameters
    ----------
    x : array_like
        Complex samples; the last axis must have power-of-two length.
        Leading axes are treated as a batch.
    direction : {"forward", "inverse"}
        The inverse uses the conjugate kernel and scales by ``1/len``.
    ops : OpCount, optional
        Incremented by one multiplication and two additions per butterfly
        (plus the 1/len scaling for the inverse).
    """
    if direction not in ("forward", "inverse"):
        raise InvalidInputError(f"unknown direction {direction!r}")
    a = np.asarray(x, dtype=complex)
    if a.ndim == 0:
        raise InvalidInputError("fft input must be at least 1-D")
    n = a.shape[-1]
    m = log2_exact(n)
    batch = a.shape[:-1]
    count = int(np.prod(batch)) if batch else 1

    if direction == "inverse":
        a = a.conj()
    a = a[..., _bit_reversal(n)]
    tw = _twiddles(n)
    half = 1
    while half < n:
        span = 2 * half
        blocks = a.reshape(batch + (n // span, span))
        w = tw[:: n // span][:half]
        top = blocks[..., :half]
        bot = blocks[..., half:] * w
        a = np.concatenate((top + bot, top - bot), axis=-1)
        half = span
    a = a.reshape(batch + (n,))

    if ops is not None:
        butterflies = count * (n // 2) * m
        ops.count(adds=2 * butterflies, mults=butterflies)
        ops.paper_model += count * fft_paper_cost(n)
    if direction == "inverse":
        a = a.conj() / n
        if ops is not None:
            ops.count(mults=count * n)
    return a


def ifft_pow2(x, ops=None):
    return fft_pow2(x, "inverse", ops=ops)


# ---------------------------------------------------------------------------
# time-domain operators
# ---------------------------------------------------------------------------

def _as_signal(f):
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1:
        raise InvalidInputError("signal must be one-dimensional")
    log2_exact(f.shape[0])
    return f


def shift(f, t):
    """Delay by ``t`` samples: ``out[n] = f[(n - t) mod N]``."""
    f = _as_signal(f)
    return np.roll(f, int(t) % f.shape[0])


def downsample(f, d_log2):
    """Keep every ``2**d_log2``-th sample: ``out[n] = f[n * 2**d_log2]``."""
    f = _as_signal(f)
    m = log2_exact(f.shape[0])
    if not 0 <= d_log2 <= m:
        raise InvalidInputError(f"downsampling exponent {d_log2} outside [0, {m}]")
    return f[:: 1 << d_log2]


def fourier_rows(shifts, freqs, n):
    """Matrix with entries ``exp(-2j*pi*t*j/n)`` for rows t in shifts, columns j in freqs."""
    t = np.asarray(shifts, dtype=np.int64).reshape(-1, 1)
    j = np.asarray(freqs, dtype=np.int64).reshape(1, -1)
    return np.exp(-2j * np.pi * ((t * j) % n) / n)


def aliased_spectra(f, level, shifts, ops=None):
    """
    Scaled DFTs of the shifted, downsampled signal for several shifts at once.

    Row ``i`` holds ``2**(M-level) * FFT(downsample(shift(f, shifts[i]), M-level))``,
    whose entry ``c`` equals ``sum_{j = c mod 2**level} F f(j) exp(-2j*pi*j*t/N)``.
    """
    f = _as_signal(f)
    n = f.shape[0]
    m = log2_exact(n)
    if not 0 <= level <= m:
        raise InvalidInputError(f"level {level} outside [0, {m}]")
    step = 1 << (m - level)
    t = np.asarray(list(shifts), dtype=np.int64).reshape(-1, 1)
    idx = (np.arange(1 << level, dtype=np.int64) * step - t) % n
    out = fft_pow2(f[idx], ops=ops) * step
    if ops is not None:
        ops.count(mults=out.size)
    return out


def aliased_spectrum(f, level, t=0, ops=None):
    """Single-shift version of :func:`aliased_spectra`."""
    return aliased_spectra(f, level, [t], ops=ops)[0]


# ---------------------------------------------------------------------------
# synthesis
# ---------------------------------------------------------------------------

def random_spectrum(support, rng):
    """I.i.d. standard circular complex Gaussian coefficients on the support."""
    k = len(support)
    vals = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) / math.sqrt(2.0)
    return dict(zip(support.indices, vals.tolist()))


def synthesize_signal(support, coeffs=None, rng=None):
    """
    Time-domain signal whose DFT equals ``coeffs`` on the support and vanishes elsewhere.

    When ``coeffs`` is omitted they are drawn with :func:`random_spectrum`.
    """
    if coeffs is None:
        coeffs = random_spectrum(support, rng if rng is not None else np.random.default_rng())
    allowed = set(support.indices)
    bad = [j for j in coeffs if j not in allowed]
    if bad:
        raise InvalidInputError(f"coefficient keys {bad[:5]} are outside the support")
    spec = np.zeros(support.n, dtype=complex)
    for j, c in coeffs.items():
        spec[j] = c
    return ifft_pow2(spec)


def restrict(full_spectrum, support):
    """Sparse view of a full-length spectrum on the support."""
    full_spectrum = np.asarray(full_spectrum)
    return {j: complex(full_spectrum[j]) for j in support.indices}
