"""Per-subcarrier equalization and post-equalization noise analysis.

equalize() works on time-domain sample blocks (CP already removed):
FFT -> per-bin weight -> IFFT, so the output is again a time-domain
block ready for de-permutation.  Analysis helpers quantify what ZF
equalization does to the noise once samples are scrambled across the
whole block: the de-permuted noise has per-sample variance
sigma_z^2 * mean(|H_k|^-2), identical on every subcarrier, which is the
basis of the semi-analytic BER route.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .errors import ShapeError, SingularChannelError
from .modem import fft_demodulate, ifft_modulate


@dataclass(frozen=True)
class EqualizerKind:
    variant: str = "zf"
    zf_floor: float = 1e-12
    discard_below: float | None = None
    fade_bias: float | None = None

    def __post_init__(self):
        if self.variant not in ("zf", "mmse"):
            raise ShapeError(f"unknown equalizer variant {self.variant!r}")
        if self.zf_floor <= 0:
            raise ShapeError("zf_floor must be positive")
        if self.discard_below is not None and self.discard_below <= 0:
            raise ShapeError("discard_below must be positive when set")
        if self.fade_bias is not None and self.fade_bias <= 0:
            raise ShapeError("fade_bias must be positive when set")


def _floor_response(h: np.ndarray, eps: float) -> np.ndarray:
    """Replace |H_k| < eps by eps * H_k/|H_k| (eps itself where H_k == 0)."""
    mag = np.abs(h)
    weak = mag < eps
    if not np.any(weak):
        return h
    out = h.copy()
    zero = mag == 0
    fix = weak & ~zero
    out[fix] = eps * h[fix] / mag[fix]
    out[zero] = eps
    return out


def equalizer_weights(h: np.ndarray, kind: EqualizerKind, snr: float | None = None) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    if kind.variant == "mmse":
        if snr is None or snr <= 0:
            raise ShapeError("mmse weights need a positive snr")
        w = np.conj(h) / (np.abs(h) ** 2 + 1.0 / snr)
    else:
        heff = h
        if kind.fade_bias is not None:
            mag = np.abs(h)
            weak = mag < kind.fade_bias
            heff = h.copy()
            nz = weak & (mag > 0)
            heff[nz] = h[nz] * (mag[nz] + kind.fade_bias) / mag[nz]
            heff[weak & (mag == 0)] = kind.fade_bias
        w = 1.0 / _floor_response(heff, kind.zf_floor)
    if kind.discard_below is not None:
        w = w.copy()
        w[np.abs(h) < kind.discard_below] = 0.0
    return w


def equalize(y: np.ndarray, h: np.ndarray, kind: EqualizerKind, snr: float | None = None) -> np.ndarray:
    """Equalize one block (or rows of blocks) in the frequency domain."""
    y = np.asarray(y, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    if y.shape[-1] != h.size:
        raise ShapeError(f"block length {y.shape[-1]} != response length {h.size}")
    w = equalizer_weights(h, kind, snr)
    return ifft_modulate(fft_demodulate(y) * w)


@dataclass(frozen=True, eq=False)
class NoiseMixing:
    """First row of the circulant matrix mapping pre-FFT noise to de-permuted noise."""

    first_row: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.first_row.size)

    def full_matrix(self) -> np.ndarray:
        rows = [np.roll(self.first_row, r) for r in range(self.n)]
        return np.vstack(rows)


def noise_mixing_row(h: np.ndarray) -> NoiseMixing:
    """Row 0 of V = F^H diag(1/H) F: entry m is (1/N) sum_k eps^{-mk} / H_k."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 1 or h.size == 0:
        raise ShapeError("response must be a non-empty 1-D vector")
    if np.any(h == 0):
        raise SingularChannelError("response has a zero bin; apply a floor first")
    return NoiseMixing(first_row=np.fft.fft(1.0 / h) / h.size)


def conditional_snr_zf(h: np.ndarray, snr: float, zf_floor: float = 0.0) -> float:
    """Post-ZF symbol SNR for a scrambled block: snr / mean(|H_k|^-2)."""
    h = np.asarray(h, dtype=np.complex128)
    if snr <= 0:
        raise ShapeError("snr must be positive")
    if zf_floor > 0:
        h = _floor_response(h, zf_floor)
    elif np.any(h == 0):
        raise SingularChannelError("response has a zero bin and no floor was given")
    return float(snr / np.mean(np.abs(h) ** -2.0))


def qfunc(x):
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / np.sqrt(2.0))


def ber_awgn_qam(M: int, snr) -> np.ndarray | float:
    """Gray-coded square-QAM bit error rate on AWGN at the given symbol SNR.

    Exact for M = 4; the standard nearest-neighbor expression
    (4/log2 M)(1 - 1/sqrt(M)) Q(sqrt(3 snr/(M-1))) otherwise.
    """
    if M < 4 or (M & (M - 1)) or (M.bit_length() - 1) % 2:
        raise ShapeError(f"M must be an even power of two >= 4, got {M}")
    snr = np.asarray(snr, dtype=np.float64)
    k = M.bit_length() - 1
    ber = (4.0 / k) * (1.0 - 1.0 / np.sqrt(M)) * qfunc(np.sqrt(3.0 * snr / (M - 1)))
    return float(ber) if ber.ndim == 0 else ber


def semi_analytic_ber(h_ensemble, snr: float, M: int, zf_floor: float = 1e-12) -> float:
    """Average the AWGN closed form over per-realization post-ZF SNRs."""
    vals = [
        ber_awgn_qam(M, conditional_snr_zf(h, snr, zf_floor=zf_floor))
        for h in h_ensemble
    ]
    if not vals:
        raise ShapeError("empty channel ensemble")
    return float(np.mean(vals))
