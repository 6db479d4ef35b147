"""Time-domain hybrid PAM (TDHP) for rate/distance-adaptive underwater optical links.

Closed-form and Monte-Carlo BER for mixed PAM2/PAM4 frames, FEC-limit search,
power-split optimisation, and the geometric link budget that turns a required
SNR into a maximum transmission distance.
"""

__version__ = "0.1.0"

from .analytic import (
    DEFAULT_Q_GRID,
    FEC_THRESHOLD,
    FecSearchResult,
    QOptimum,
    TdhpParams,
    ber_pam2,
    ber_pam4,
    ber_tdhp,
    bits_per_symbol,
    db_linear,
    fec_limit_snr,
    linear_db,
    optimize_q,
)
from .channel import BLUE, GREEN, RED, AbsorptionModel, ChannelPreset, preset
from .errors import ConfigError, DomainError, NoSolution
from .eye import EyeTraceSet, eye_traces
from .link import (
    ApertureMode,
    LinkGeometry,
    LmaxResult,
    aperture,
    effective_aperture,
    lmax_for_params,
    snr_at_distance,
    solve_lmax,
)
from .simulation import BerEstimate, Format, Frame, add_awgn, build_frame, demap, measure_ber
from .sweeps import SweepRecord, SweepSpec, run_sweep, sweep_geometry, sweep_p, sweep_q
