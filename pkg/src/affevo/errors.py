class AffevoError(Exception):
    """Base class for library errors."""


class InflexionError(AffevoError):
    """The curve has (or numerically approaches) an inflexion, [g_t, g_tt] = 0."""

    def __init__(self, min_abs_kappa: float, threshold: float, reason: str = ""):
        self.min_abs_kappa = min_abs_kappa
        self.threshold = threshold
        msg = f"inflexion: min |kappa| = {min_abs_kappa:.6g} (threshold {threshold:.3g})"
        if reason:
            msg = f"{msg}; {reason}"
        super().__init__(msg)


class UndersampledError(AffevoError):
    """Sampled input is not resolved by its own Fourier spectrum."""


class NumericalError(AffevoError):
    """A numerical step failed (ill-conditioning, non-convergence, bad root)."""
