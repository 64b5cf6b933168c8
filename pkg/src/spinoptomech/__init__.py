"""Cavity optomechanics with a spin-orbit-coupled spinor condensate."""
__version__ = "0.1.0"

from .errors import (SpinOptomechError, NonPositiveRate, NonFiniteInput, NegativePower,
                     FixedPointDiverged, NoRealRoot, EigenSolverFailure, ScanRangeExhausted,
                     UnstableOperatingPoint, SingularResolvent, GridTooNarrow, ZeroPump,
                     ConfigError, ParseError, UnknownKey, TypeMismatch, ConstraintViolation)
from .params import (ModelParams, NoiseKernel, KernelKind, normalize_params, to_absolute,
                     brownian_psd, coupling_from_power, input_noise_kernels)
from .dispersion import (BlochMatrix, BandStructure, GapReport, bloch_matrix, band_energies,
                         band_scan, band_gap_and_minima)
from .steady import (Branch, SteadyState, BistabilityResult, steady_state,
                     steady_state_branches, bistability_threshold)
from .stability import (DriftSystem, StabilityVerdict, RouthHurwitzReport, drift_matrix,
                        eigen_stability, routh_hurwitz_flags, stability_report)
from .spectra import (Mode, Observable, Path, Spin, AuxFunctions, SpectrumSeries,
                      aux_functions, transfer_functions, dns_atomic, dns_mirror, output_dns,
                      spectrum_series, resolvent_spectrum, sideband_peaks)
from .thermometry import TemperatureReport, position_variance, effective_temperature
from .dsf import DsfCurve, dsf, dsf_prefactor
from .config import RunConfig, parse_config
