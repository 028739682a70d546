"""System defaults for the indoor 60 GHz hall."""
import math

WAVELENGTH_M = 5e-3
BANDWIDTH_HZ = 500e6
TX_POWER_MW = 1.0
NOISE_DENSITY_DBM_PER_MHZ = -114.0
HALL_RADIUS_M = 15.0
PATH_LOSS_EXPONENT = 2.45
FAR_FIELD_M = 0.5
MAX_LINKS = 30

THETA_M_RANGE = (math.pi / 12, math.pi / 2)
RHO_MAX = 1.0 / 6.0
# 10**(0.3/eta**2) must stay representable, with Gs well clear of underflow.
ETA_MIN = 0.04


def noise_power_mw(
    density_dbm_per_mhz: float = NOISE_DENSITY_DBM_PER_MHZ,
    bandwidth_hz: float = BANDWIDTH_HZ,
) -> float:
    """Thermal noise power in milliwatts over ``bandwidth_hz``."""
    dbm = density_dbm_per_mhz + 10.0 * math.log10(bandwidth_hz / 1e6)
    return 10.0 ** (dbm / 10.0)


def to_db(x):
    import numpy as np

    return 10.0 * np.log10(x)


def from_db(x_db):
    import numpy as np

    return 10.0 ** (np.asarray(x_db) / 10.0)
