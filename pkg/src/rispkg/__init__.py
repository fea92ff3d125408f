"""Physical-layer key generation over RIS-reconfigurable channels."""
from __future__ import annotations

from .channel import ChannelRealization, ChannelStats, ConfigurationError, cascaded_gain, draw_realization, tapped_response
from .keygen import BitString, ReconcileParams, bdr, cdf_quantize, kgr, privacy_amplify, reconcile, rss_threshold_quantize
from .probing import ProbeSession, block_average, run_session
from .ris import Mode, RisConfig, RisSchedule, ScheduleKind, random_config, reflection_coeffs, schedule_config

__all__ = [
    "BitString",
    "ChannelRealization",
    "ChannelStats",
    "ConfigurationError",
    "Mode",
    "ProbeSession",
    "ReconcileParams",
    "RisConfig",
    "RisSchedule",
    "ScheduleKind",
    "bdr",
    "block_average",
    "cascaded_gain",
    "cdf_quantize",
    "draw_realization",
    "kgr",
    "privacy_amplify",
    "random_config",
    "reconcile",
    "reflection_coeffs",
    "rss_threshold_quantize",
    "run_session",
    "schedule_config",
    "tapped_response",
]
