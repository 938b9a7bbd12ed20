"""Gaussian biphoton diffraction through a double slit: Gouy phases,
logarithmic negativity and Gouy-difference extraction from fringes."""

__version__ = "0.1.0"

from .params import (ConfigError, ScaleConstants, SlitGeometry, SourceParams, load_config,
                     default_source, parse_length, rayleigh_lengths, sigma_from_crystal)
from .propagation import (ComplexQuadraticForm, DegenerateConfiguration, PathLabel, SlitWavepacket,
                          free_gouy, free_state, gaussian_propagate, slit_gouy, slit_wavepacket)
from .entanglement import (CorrelationReport, CovarianceMatrix, SymplecticSpectrum,
                           covariance_from_form, covariance_from_wavepacket, cross_correlation,
                           free_cross_correlation, log_negativity, log_negativity_closed_form,
                           symplectic_spectrum, wavepacket_negativity)
from .interference import (GouyMeasurement, ScreenPattern, ScreenPoint, amplitude,
                           find_measurement_point, gouy_difference_extract, phase_difference,
                           screen_pattern, visibility_closed)
