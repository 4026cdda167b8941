from ppcount.constants.archimedean import (
    VolumeEstimate,
    arch_volume_p1,
    area_R1,
    vol_S1,
)
from ppcount.constants.leading import (
    LeadingConstant,
    LocalVolume,
    leading_constant,
    leading_constant_deg1,
    leading_constant_deg2,
)
from ppcount.constants.mahler import mahler_inf, mahler_p
from ppcount.constants.padic import (
    local_density,
    max_common_valuation,
    padic_local_factor,
    padic_region_volume,
)
from ppcount.constants.zeta import zeta_val

__all__ = [
    "LeadingConstant",
    "LocalVolume",
    "VolumeEstimate",
    "arch_volume_p1",
    "area_R1",
    "leading_constant",
    "leading_constant_deg1",
    "leading_constant_deg2",
    "local_density",
    "mahler_inf",
    "mahler_p",
    "max_common_valuation",
    "padic_local_factor",
    "padic_region_volume",
    "vol_S1",
    "zeta_val",
]
