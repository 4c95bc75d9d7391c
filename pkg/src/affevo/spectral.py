"""Fourier tools for uniformly sampled 2*pi-periodic data.

All routines assume samples at ``t_j = 2*pi*j/n``, ``j = 0..n-1``.
"""

from __future__ import annotations

import numpy as np


def wavenumbers(n: int) -> np.ndarray:
    """Nonnegative wavenumbers of ``np.fft.rfft`` output for ``n`` samples."""
    return np.arange(n // 2 + 1, dtype=float)


def _strip_nyquist(coeffs: np.ndarray, n: int) -> np.ndarray:
    # The Nyquist mode of an even-length real signal has no well-defined
    # odd derivative; dropping it keeps every derivative real and consistent.
    if n % 2 == 0:
        coeffs = coeffs.copy()
        coeffs[-1] = 0.0
    return coeffs


def _denoise(coeffs: np.ndarray, cutoff: float) -> np.ndarray:
    amp = np.abs(coeffs)
    floor = cutoff * amp.max(axis=0, keepdims=True)
    return np.where(amp > floor, coeffs, 0.0)


def spectral_derivative(values: np.ndarray, order: int = 1, cutoff: float = 0.0) -> np.ndarray:
    """Derivative of periodic samples along axis 0.

    Exact (to round-off) for trigonometric polynomials of degree < n/2.
    Modes with amplitude at most ``cutoff`` times the largest one are treated
    as round-off and dropped before differentiating; without this, repeated
    differentiation of a constant amplifies noise by roughly (n/2)**order.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if order == 0:
        return values.copy()
    coeffs = _strip_nyquist(np.fft.rfft(values, axis=0), n)
    if cutoff > 0.0:
        coeffs = _denoise(coeffs, cutoff)
    factor = (1j * wavenumbers(n)) ** order
    factor = factor.reshape((-1,) + (1,) * (values.ndim - 1))
    return np.fft.irfft(coeffs * factor, n=n, axis=0)


def resample(values: np.ndarray, n_out: int, order: int = 0) -> np.ndarray:
    """Fourier-interpolate ``values`` (m samples) onto ``n_out >= m`` samples.

    ``order`` > 0 returns the derivative of the interpolant instead.
    """
    values = np.asarray(values, dtype=float)
    m = values.shape[0]
    if n_out < m:
        raise ValueError(f"cannot resample {m} points down to {n_out}")
    coeffs = _strip_nyquist(np.fft.rfft(values, axis=0), m) / m
    padded = np.zeros((n_out // 2 + 1,) + values.shape[1:], dtype=complex)
    padded[: coeffs.shape[0]] = coeffs
    factor = (1j * wavenumbers(n_out)) ** order
    padded *= factor.reshape((-1,) + (1,) * (values.ndim - 1))
    return np.fft.irfft(padded, n=n_out, axis=0) * n_out


def trailing_spectrum_ratio(values: np.ndarray) -> float:
    """Largest relative amplitude among the upper half of the resolved modes.

    Smooth, well-sampled data gives values near machine precision; large
    values mean the grid does not resolve the signal.
    """
    values = np.asarray(values, dtype=float)
    m = values.shape[0]
    amp = np.abs(np.fft.rfft(values, axis=0))
    if amp.ndim > 1:
        amp = amp.max(axis=tuple(range(1, amp.ndim)))
    kmax = (m - 1) // 2
    top = amp[1 : kmax + 1].max(initial=0.0)
    if top == 0.0:
        return 0.0
    return float(amp[kmax // 2 + 1 : kmax + 1].max(initial=0.0) / top)


def periodic_antiderivative(values: np.ndarray) -> tuple[np.ndarray, float]:
    """Integral from 0 to ``t_j`` of periodic samples, and the period integral.

    The mean part integrates to a linear ramp; the oscillating part is
    integrated in Fourier space, so accuracy is spectral.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    coeffs = _strip_nyquist(np.fft.rfft(values), n)
    mean = coeffs[0].real / n
    k = wavenumbers(n)
    osc = np.zeros_like(coeffs)
    osc[1:] = coeffs[1:] / (1j * k[1:])
    prim = np.fft.irfft(osc, n=n)
    t = 2.0 * np.pi * np.arange(n) / n
    integral = mean * t + prim - prim[0]
    return integral, 2.0 * np.pi * mean


class PeriodicInterpolant:
    """Trigonometric interpolant of periodic samples, evaluated anywhere.

    ``values`` has shape ``(n,)`` or ``(n, m)``; calling the interpolant at a
    scalar ``t`` returns shape ``()`` or ``(m,)``.
    """

    def __init__(self, values: np.ndarray):
        values = np.asarray(values, dtype=float)
        self.n = values.shape[0]
        self._shape = values.shape[1:]
        flat = values.reshape(self.n, -1)
        coeffs = _strip_nyquist(np.fft.rfft(flat, axis=0), self.n) / self.n
        coeffs[1:] *= 2.0
        self._a = coeffs.real
        self._b = -coeffs.imag
        self._k = wavenumbers(self.n)

    def __call__(self, t: float) -> np.ndarray:
        phase = self._k * t
        out = np.cos(phase) @ self._a + np.sin(phase) @ self._b
        return out.reshape(self._shape)
