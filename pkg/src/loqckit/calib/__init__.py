"""Fitting and calibration procedures built on one least-squares engine."""

from loqckit.calib.cnot import fit_cnot_transmission
from loqckit.calib.coupler import (
    coupler_model,
    cross_ratio,
    fit_coupler_dispersion,
    fit_coupler_sweep,
)
from loqckit.calib.insertion import (
    CalibrationRun,
    CalibrationSolution,
    DutRun,
    InsertionLossReport,
    calibrate_insertion,
    fit_calibration,
)
from loqckit.calib.lsq import FitResult, least_squares
from loqckit.calib.mzi import BeamSplitterPhase, MziFringeFit, extract_bs_phase
from loqckit.calib.ring import (
    LinewidthAssignment,
    disambiguate_linewidths,
    find_resonances,
    fit_ring,
    ring_params,
)
from loqckit.calib.sweep import SweepDataset, boxcar_average

__all__ = [
    "BeamSplitterPhase",
    "CalibrationRun",
    "CalibrationSolution",
    "DutRun",
    "FitResult",
    "InsertionLossReport",
    "LinewidthAssignment",
    "MziFringeFit",
    "SweepDataset",
    "boxcar_average",
    "calibrate_insertion",
    "coupler_model",
    "cross_ratio",
    "disambiguate_linewidths",
    "extract_bs_phase",
    "find_resonances",
    "fit_calibration",
    "fit_cnot_transmission",
    "fit_coupler_dispersion",
    "fit_coupler_sweep",
    "fit_ring",
    "least_squares",
    "ring_params",
]
