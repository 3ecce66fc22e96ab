"""decaykit: survival laws of Breit-Wigner resonances and S-matrix durations.

Units throughout: hbar = 1.
"""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .quadrature import (AnalyticCertificate, FrequencyDomain, Peak, QuadResult, QuadSpec, Strategy,
                         integrate, oscillatory_integrate)
from .spectral import (BelowThresholdWarning, ResonanceParams, SpectralDensity, density_value,
                       halfline_norm_closed_form, norm, norm_closed_form)
from .smatrix import (BlaschkePair, DelayValue, Mode, SMatrixModel, duration, durations, evaluate,
                      phase_modulus, single_pole_tau1, single_pole_tau2)
from .timedomain import (SurvivalCurve, TauTimeSeries, TauTransform, TimeGrid, survival,
                         survival_closed_form_fullline, tau_time_residues, tau_time_transform)
from .contour import (ContourSpec, Disk, HalfPlane, WindingResult, ZeroPoleInventory, count_zeros_poles,
                      log_residue_integral, winding_integral)
from .analysis import DeviationReport, ExpFit, detect_deviations, fit_exponential
