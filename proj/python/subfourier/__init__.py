"""Quasiperiodically kicked rotor: resonance scans, widths and kick spectra.

Every simulation entry point takes an optional preset name ("fig1", "fig2",
"fig3") and keyword settings using the same keys as the CLI config files,
e.g. ``scan(r, preset="fig1", beta_samples=32)``.
"""

import numpy as np

from . import _core
from ._core import AnalysisError, ConfigError, NumericalError, harmonic_weight, hbar_eff_from_lab, in_central_lobe

__all__ = [
    "AnalysisError",
    "ConfigError",
    "NumericalError",
    "classical_diffusion",
    "evolve",
    "f_half_width",
    "harmonic_weight",
    "hbar_eff_from_lab",
    "in_central_lobe",
    "peak_width",
    "run",
    "scan",
    "schedule",
    "settings",
    "spectrum",
]


def _format(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple, np.ndarray)):
        return ",".join(_format(v) for v in value)
    if value is None:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _settings(kw):
    return {k: _format(v) for k, v in kw.items()}


def _arrays(d):
    return {k: np.asarray(v) if isinstance(v, list) else v for k, v in d.items()}


def settings(preset="", **kw):
    """Resolved key=value settings after presets, overrides and lab units."""
    return dict(_core.resolved_settings(preset, _settings(kw)))


def run(command, out_dir, preset="", **kw):
    """Run a CLI command (evolve, scan, width-vs-n, spectrum, f-half, classical).

    Returns (files written, status); status 3 means a width could not be measured.
    """
    kw["out_dir"] = str(out_dir)
    files, status = _core.run_command(command, preset, _settings(kw))
    return files, status


def schedule(preset="", **kw):
    return _arrays(_core.schedule(preset, _settings(kw)))


def evolve(preset="", **kw):
    """Ensemble <P^2> and p(0) after each kick period."""
    return _arrays(_core.evolve(preset, _settings(kw)))


def scan(r, preset="", **kw):
    """p(0) against r, with the FWHM report (None if no peak could be measured)."""
    out = _arrays(_core.scan([float(x) for x in r], preset, _settings(kw)))
    return out


def spectrum(f, preset="", **kw):
    """|FT|^2 of the kick train at frequencies f (units of f1)."""
    return np.asarray(_core.spectrum([float(x) for x in f], preset, _settings(kw)))


def f_half_width(preset="", **kw):
    return _core.f_half_width(preset, _settings(kw))


def classical_diffusion(K, kicks, ensemble=100000, seed=1):
    return np.asarray(_core.classical_diffusion(K, kicks, ensemble, seed))


def peak_width(x, y, baseline=None, se=None):
    se = [] if se is None else [float(v) for v in se]
    return _core.peak_width([float(v) for v in x], [float(v) for v in y], baseline, se)
