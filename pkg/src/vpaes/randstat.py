"""Randomness battery for plaintext and cipher rasters.

Per colour channel: Shannon entropy of the 256-bin tone histogram,
adjacent-pixel correlation in three directions, the spectral (discrete
Fourier) test on the channel bit string, and a chi-square goodness-of-fit
test of the tone histogram against uniformity (255 degrees of freedom,
normal-approximated tail with mu = 255, sigma = 22.5831). The chi-square
statistic doubles as a plaintext difficulty score: the higher it is, the
less random the source image, and the more the per-block permutations
matter.

Samplers are seeded, so every reported number is reproducible from
(input bytes, seed).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import chdtrc

from .errors import DomainError, PreconditionError

_SQRT2 = math.sqrt(2.0)

CHI_MEAN = 255.0
CHI_SIGMA = 22.5831  # sqrt(2*255), kept at the reporting precision
DEFAULT_SAMPLES = 3000
DIRECTIONS = ("horizontal", "vertical", "diagonal")
_STEPS = {"horizontal": (0, 1), "vertical": (1, 0), "diagonal": (1, 1)}
_CHANNEL_INDEX = {"red": 0, "green": 1, "blue": 2, "gray": 0}


def channel_names(channels):
    return ("red", "green", "blue") if channels == 3 else ("gray",)


def phi(z):
    """Cumulative standard normal distribution."""
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


def erfc(z):
    """Complementary error function; erfc(z/sqrt(2)) = 2*(1 - phi(z))."""
    return math.erfc(z)


@dataclass(frozen=True, eq=False)
class PairSample:
    """Byte values of adjacent pixel pairs in one direction and channel."""

    direction: str
    channel: str
    xs: np.ndarray
    ys: np.ndarray
    seed: int

    @property
    def count(self):
        return len(self.xs)


@dataclass(frozen=True, eq=False)
class ToneHistogram:
    """256-bin count of one channel's byte values."""

    channel: str
    bins: np.ndarray

    def __post_init__(self):
        if self.bins.shape != (256,):
            raise DomainError(f"need 256 bins, got shape {self.bins.shape}")

    @property
    def total(self):
        return int(self.bins.sum())


@dataclass(frozen=True)
class TestReport:
    test: str
    channel: str
    statistic: float
    p_value: float = None
    alpha: float = None
    decision: str = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.p_value is not None and self.alpha is not None:
            expected = "accepted" if self.p_value >= self.alpha else "rejected"
            if self.decision != expected:
                raise DomainError(
                    f"decision {self.decision!r} contradicts "
                    f"p={self.p_value} vs alpha={self.alpha}")


def _decided(test, channel, statistic, p_value, alpha, extras=None):
    decision = "accepted" if p_value >= alpha else "rejected"
    return TestReport(test, channel, statistic, p_value, alpha, decision,
                      extras or {})


def _plane(img, channel):
    if channel not in _CHANNEL_INDEX:
        raise DomainError(f"unknown channel {channel!r}")
    if (channel == "gray") != (img.channels == 1):
        raise DomainError(
            f"channel {channel!r} does not exist in a "
            f"{img.channels}-channel image")
    arr = np.frombuffer(img.data, dtype=np.uint8).reshape(
        img.height, img.width, img.channels)
    return arr[:, :, _CHANNEL_INDEX[channel]]


def tone_histogram(img, channel):
    plane = _plane(img, channel)
    bins = np.bincount(plane.ravel(), minlength=256)
    return ToneHistogram(channel, bins)


def channel_bits(img, channel):
    """The channel's bytes as a flat 0/1 array, row-major, MSB first."""
    return np.unpackbits(np.ascontiguousarray(_plane(img, channel)))


def sample_adjacent_pairs(img, direction, channel, count=DEFAULT_SAMPLES,
                          seed=0):
    """Seeded uniform sample of `count` adjacent pixel pairs.

    Base positions are drawn so the neighbour (one step right, down, or
    down-right) always exists; diagonal sampling therefore never starts in
    the last row or column.
    """
    if direction not in _STEPS:
        raise DomainError(f"unknown direction {direction!r}")
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    dr, dc = _STEPS[direction]
    plane = _plane(img, channel)
    max_row = img.height - dr
    max_col = img.width - dc
    if max_row < 1 or max_col < 1:
        raise PreconditionError(
            f"{img.width}x{img.height} image has no {direction} neighbours")
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, max_row, size=count)
    cols = rng.integers(0, max_col, size=count)
    return PairSample(direction, channel, plane[rows, cols],
                      plane[rows + dr, cols + dc], seed)


def _pearson(xs, ys):
    if len(xs) < 2:
        raise DomainError("correlation needs at least 2 pairs")
    x = xs.astype(np.float64)
    y = ys.astype(np.float64)
    dx = x - x.mean()
    dy = y - y.mean()
    var_x = float(np.mean(dx * dx))
    var_y = float(np.mean(dy * dy))
    if var_x == 0.0 or var_y == 0.0:
        raise DomainError(
            "correlation undefined: a coordinate has zero variance")
    r = float(np.mean(dx * dy)) / math.sqrt(var_x * var_y)
    return max(-1.0, min(1.0, r))


def correlation(sample):
    """Sample Pearson correlation of the pair values (1/M normalisation)."""
    return _pearson(sample.xs, sample.ys)


def entropy(hist):
    """Shannon entropy of the tone distribution, in [0, 8] bits."""
    total = hist.total
    if total <= 0:
        raise DomainError("entropy of an empty histogram is undefined")
    counts = hist.bins[hist.bins > 0].astype(np.float64)
    p = counts / total
    return float(-np.sum(p * np.log2(p)))


def spectral_dft_test(bits, alpha=0.01, channel=""):
    """Spectral test: too few (or too many) low-magnitude DFT peaks of the
    +/-1 sequence betray periodic structure.

    Odd-length inputs drop the final bit. The peak count N1 over
    j = 1..n/2-1 is compared with the 95% expectation N0 = 0.95*n/2 via
    d = (N1-N0)/sqrt(n*0.95*0.05/4) and P = erfc(|d|/sqrt(2)).
    """
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size and bits.max() > 1:
        raise DomainError("bit sequence may only hold 0s and 1s")
    n = len(bits)
    if n < 1000:
        raise PreconditionError(
            f"spectral test needs at least 1000 bits, got {n}")
    if n % 2:
        bits = bits[:-1]
        n -= 1
    x = bits.astype(np.float64) * 2.0 - 1.0
    moduli = np.abs(np.fft.rfft(x)[1:n // 2])
    threshold = math.sqrt(n * math.log(1.0 / 0.05))
    n1 = int(np.count_nonzero(moduli < threshold))
    n0 = 0.95 * n / 2.0
    d = (n1 - n0) / math.sqrt(n * 0.95 * 0.05 / 4.0)
    p_value = erfc(abs(d) / _SQRT2)
    return _decided(
        "spectral_dft", channel, d, p_value, alpha,
        {"n": n, "n0": n0, "n1": n1, "peak_threshold": threshold})


def chi_square_statistic(hist):
    """Tone-histogram deviation from uniform: sum (o_i - e_i)^2 / e_i."""
    total = hist.total
    if total <= 0:
        raise DomainError("chi-square of an empty histogram is undefined")
    e = total / 256.0
    o = hist.bins.astype(np.float64)
    return float(np.sum((o - e) ** 2) / e)


def chi_square_p_value(chi2):
    """Upper tail of the N(255, 22.5831^2) approximation at chi2.

    Equals 1 - phi((chi2 - 255)/22.5831), evaluated through erfc so deep
    tails keep precision.
    """
    z = (chi2 - CHI_MEAN) / CHI_SIGMA
    return 0.5 * erfc(z / _SQRT2)


def chi_square_tone_test(hist, alpha=0.01):
    """Goodness-of-fit of the tone histogram against uniformity.

    P-value comes from the normal approximation (chi_square_p_value); the
    exact chi-square-distribution tail is reported alongside, clearly
    labelled, for reference.
    """
    if hist.total < 2560:
        raise PreconditionError(
            f"chi-square tone test needs >= 2560 samples (10 per bin), "
            f"got {hist.total}")
    chi2 = chi_square_statistic(hist)
    return _decided(
        "chi_square_tone", hist.channel, chi2, chi_square_p_value(chi2),
        alpha, {"p_value_exact_chi2": float(chdtrc(255, chi2))})


def plaintext_selection_score(img):
    """Per-channel chi-square of the plaintext tone histogram.

    A difficulty score, not a hypothesis test: images scoring high (say
    above 10^7) have strongly ordered tones and are the hard encryption
    cases worth validating against.
    """
    return {
        ch: chi_square_statistic(tone_histogram(img, ch))
        for ch in channel_names(img.channels)
    }


def sensitivity_correlation(c1, c2, count=DEFAULT_SAMPLES, seed=0):
    """Per-channel correlation of two ciphertexts at identical positions.

    Meant for containers produced from one image under two keys; values
    near zero mean the key change decorrelated every channel.
    """
    if (c1.width, c1.height, c1.channels) != (
            c2.width, c2.height, c2.channels):
        raise DomainError(
            f"container shapes differ: {c1.width}x{c1.height}x{c1.channels} "
            f"vs {c2.width}x{c2.height}x{c2.channels}")
    if count < 2:
        raise DomainError(f"count must be at least 2, got {count}")
    pixels = c1.width * c1.height
    channels = c1.channels
    a = np.frombuffer(c1.payload, dtype=np.uint8)
    b = np.frombuffer(c2.payload, dtype=np.uint8)
    rng = np.random.default_rng(seed)
    positions = rng.integers(0, pixels, size=count)
    out = {}
    for idx, ch in enumerate(channel_names(channels)):
        flat = positions * channels + idx
        out[ch] = _pearson(a[flat], b[flat])
    return out
