"""Ground-truth sample models: direct (psi, delta), Fresnel interfaces and
thin-film stacks, and the mapping between reflection coefficients and the
(beta, psi, delta) parameters used by the coincidence-rate model.

Conventions (see README for the interop notes):
  * tan(psi) is the *intensity*-reflectance ratio R_H / R_V of the p- and
    s-polarized waves, so beta = sqrt(tan psi) = |r_p| / |r_s| is the
    amplitude ratio.  The mainstream ellipsometry angle is atan(beta).
  * delta = arg(r_p) - arg(r_s), wrapped to (-pi, pi].
  * Fresnel signs: at normal incidence r_p and r_s have opposite signs
    (r_p = +(n2-n1)/(n2+n1) for light going from n1 into n2).
  * Time convention e^{-i omega t}: absorbing indices carry a positive
    imaginary part internally.  Inputs written as n - i*kappa are
    conjugated on entry; this flips the sign of delta (unobservable in
    the coincidence scheme, which sees cos(delta) only) and leaves psi
    and all magnitudes unchanged.
"""

from dataclasses import dataclass

import numpy as np

_TWO_PI = 2.0 * np.pi


def wrap_phase(delta: float) -> float:
    """Wrap a phase to the canonical interval (-pi, pi]."""
    d = float(delta) % _TWO_PI
    if d > np.pi:
        d -= _TWO_PI
    return d


@dataclass(frozen=True)
class SampleParams:
    """Ellipsometric sample description: psi in [0, pi/2), delta in (-pi, pi]."""

    psi: float
    delta: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.psi) or not (0.0 <= self.psi < np.pi / 2):
            raise ValueError(f"psi must lie in [0, pi/2), got {self.psi}")
        if not np.isfinite(self.delta):
            raise ValueError("delta must be finite")
        object.__setattr__(self, "delta", wrap_phase(self.delta))

    @property
    def beta(self) -> float:
        """Amplitude-reflectance ratio sqrt(tan psi)."""
        return float(np.sqrt(np.tan(self.psi)))

    @classmethod
    def from_beta_delta(cls, beta: float, delta: float) -> "SampleParams":
        if not (np.isfinite(beta) and beta >= 0.0):
            raise ValueError(f"beta must be finite and >= 0, got {beta}")
        return cls(psi=float(np.arctan(beta * beta)), delta=delta)

    @classmethod
    def mirror(cls) -> "SampleParams":
        """Perfect mirror: equal reflection of both polarizations, no phase shift."""
        return cls(psi=np.pi / 4, delta=0.0)


@dataclass(frozen=True)
class ReflectionPair:
    """Amplitude reflection coefficients: r_p (H, in-plane) and r_s (V, out-of-plane)."""

    r_p: complex
    r_s: complex

    def __post_init__(self):
        for name in ("r_p", "r_s"):
            v = complex(getattr(self, name))
            if not (np.isfinite(v.real) and np.isfinite(v.imag)):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class FilmStack:
    """Planar multilayer: ambient / layers (top to bottom) / substrate.

    layers is a sequence of (complex refractive index, thickness in meters);
    wavelength is the vacuum wavelength in meters.
    """

    wavelength: float
    incidence_angle: float
    n_ambient: float
    layers: tuple
    n_substrate: complex

    def __post_init__(self):
        if not (np.isfinite(self.wavelength) and self.wavelength > 0):
            raise ValueError("wavelength must be positive")
        if not (0.0 <= self.incidence_angle < np.pi / 2):
            raise ValueError("incidence_angle must lie in [0, pi/2)")
        if not (np.isfinite(self.n_ambient) and self.n_ambient > 0):
            raise ValueError("n_ambient must be positive")
        layers = tuple((complex(n), float(d)) for n, d in self.layers)
        for n, d in layers:
            if d < 0:
                raise ValueError("layer thicknesses must be >= 0")
            if not (np.isfinite(n.real) and np.isfinite(n.imag)):
                raise ValueError("layer indices must be finite")
        object.__setattr__(self, "layers", layers)
        object.__setattr__(self, "n_substrate", complex(self.n_substrate))


def sample_jones(params: SampleParams) -> np.ndarray:
    """Jones operator of the sample reflection, diag(beta e^{i delta}, 1).

    The V (s) coefficient is normalized to 1; the absolute reflectance is
    absorbed into the experiment's rate constant.
    """
    return np.array(
        [[params.beta * np.exp(1j * params.delta), 0.0], [0.0, 1.0]], dtype=complex
    )


def _canonical_index(n: complex) -> complex:
    """Map an index to the internal e^{-i omega t} convention, Im(n) >= 0."""
    n = complex(n)
    return n.conjugate() if n.imag < 0 else n


def _cos_transmitted(n: complex, sin_inc: float) -> complex:
    """Cosine of the propagation angle inside a medium of index n.

    Branch: Im(n cos) >= 0, so the transmitted wave decays into the
    medium; this also gives the evanescent decay beyond the critical
    angle of a lossless interface.
    """
    ct = np.sqrt(complex(1.0) - (sin_inc / n) ** 2)
    if (n * ct).imag < 0:
        ct = -ct
    return ct


def _stack_coefficients(
    n_ambient: float, angle: float, layers, n_substrate: complex, wavelength: float
) -> ReflectionPair:
    """Characteristic-matrix reflection coefficients of a multilayer."""
    sin_inc = n_ambient * np.sin(angle)
    cos_inc = np.cos(angle)
    n_sub = _canonical_index(n_substrate)
    layers = [(_canonical_index(n), d) for n, d in layers]
    cos_sub = _cos_transmitted(n_sub, sin_inc)

    out = {}
    for pol in ("s", "p"):
        if pol == "s":
            eta0 = n_ambient * cos_inc
            eta_sub = n_sub * cos_sub
        else:
            eta0 = n_ambient / cos_inc
            eta_sub = n_sub / cos_sub
        m = np.eye(2, dtype=complex)
        for n, d in layers:
            ct = _cos_transmitted(n, sin_inc)
            phase = _TWO_PI * n * d * ct / wavelength
            eta = n * ct if pol == "s" else n / ct
            c, s = np.cos(phase), np.sin(phase)
            m = m @ np.array([[c, -1j * s / eta], [-1j * eta * s, c]])
        b, cc = m @ np.array([1.0, eta_sub])
        out[pol] = (eta0 * b - cc) / (eta0 * b + cc)
    # Admittance form gives r_p and r_s the same sign at normal incidence;
    # flip p to the opposite-sign convention documented above.
    return ReflectionPair(r_p=-out["p"], r_s=out["s"])


def fresnel_interface(n_ambient: float, n_substrate: complex, angle: float) -> ReflectionPair:
    """Amplitude reflection coefficients of a single ambient/substrate interface."""
    if not (np.isfinite(n_ambient) and n_ambient > 0):
        raise ValueError("n_ambient must be positive")
    if not (0.0 <= angle < np.pi / 2):
        raise ValueError("incidence angle must lie in [0, pi/2); grazing rejected")
    return _stack_coefficients(n_ambient, angle, (), complex(n_substrate), 1.0)


def film_stack_reflectance(stack: FilmStack) -> ReflectionPair:
    """Reflection coefficients of the full multilayer stack.

    With zero layers this reduces exactly (bit for bit) to
    fresnel_interface(n_ambient, n_substrate, incidence_angle).
    """
    return _stack_coefficients(
        stack.n_ambient,
        stack.incidence_angle,
        stack.layers,
        stack.n_substrate,
        stack.wavelength,
    )


def psi_delta_from_coeffs(pair: ReflectionPair) -> SampleParams:
    """Map reflection coefficients to (psi, delta).

    tan(psi) = |r_p|^2 / |r_s|^2 (intensity ratio), so beta = |r_p|/|r_s|;
    delta = arg(r_p) - arg(r_s) wrapped to (-pi, pi].
    """
    if pair.r_s == 0:
        raise ValueError("V-null sample: r_s = 0, psi/delta undefined")
    if pair.r_p == 0:
        raise ValueError("degenerate: psi=0, delta undefined (r_p = 0)")
    beta = abs(pair.r_p) / abs(pair.r_s)
    delta = wrap_phase(np.angle(pair.r_p) - np.angle(pair.r_s))
    return SampleParams(psi=float(np.arctan(beta * beta)), delta=delta)
