"""Unit conversions.

Internal conventions: wavelengths in nm, device lengths in um, propagation
loss in 1/cm or dB/cm. Every conversion between these goes through here.
"""

import math

import numpy as np

NM_PER_UM = 1.0e3
NM_PER_CM = 1.0e7
NM_PER_PM = 1.0e-3
DB_PER_NEPER_POWER = 10.0 / math.log(10.0)  # 4.3429...


def um_to_nm(x):
    return x * NM_PER_UM


def nm_to_um(x):
    return x / NM_PER_UM


def pm_to_nm(x):
    return x * NM_PER_PM


def nm_to_pm(x):
    return x / NM_PER_PM


def nm_to_cm(x):
    return x / NM_PER_CM


def per_nm_to_per_cm(x):
    return x * NM_PER_CM


def alpha_to_db(alpha):
    """Power attenuation coefficient (1/length) to dB per the same length."""
    return alpha * DB_PER_NEPER_POWER


def to_db(ratio):
    """Linear power ratio to dB."""
    return 10.0 * np.log10(ratio)


def from_db(db):
    """dB to linear power ratio."""
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)
