"""Cave survey sizing: robot count, hop count and mapping time."""

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .._validation import check_positive, raise_if
from ..navigation.camera import range_for_resolution

COMM_RANGE = 30.0  # m
HOP_TIME_TRANSIT = 1.35  # min per relay-spacing hop
HOP_TIME_SCAN = 0.125  # min per scan hop
SCAN_MINUTES = 1.0  # one full turret turn at 1 rpm

# Published survey table: resolution -> camera range, and per cave length
# the robot count and mapping time in minutes.
REFERENCE_RESOLUTIONS = (5, 10, 20, 30, 50, 80)
REFERENCE_RANGES = (1.96, 2.77, 3.92, 4.80, 6.20, 7.84)
REFERENCE_LENGTHS = (250.0, 500.0, 1000.0, 2000.0)
REFERENCE_ROBOTS = {250.0: 11, 500.0: 19, 1000.0: 36, 2000.0: 69}
REFERENCE_TIMES = {
    250.0: (83, 62, 47, 41, 34, 29),
    500.0: (156, 116, 88, 76, 63, 54),
    1000.0: (303, 225, 171, 147, 123, 105),
    2000.0: (595, 443, 335, 288, 241, 205),
}


@dataclass(frozen=True)
class CaveSpec:
    length: float  # m
    height: float = 3.0
    width: float = 4.0
    comm_range: float = COMM_RANGE

    def __post_init__(self):
        raise_if(self.problems())

    def problems(self):
        return [f"{name} must be > 0, got {value!r}" for name, value in asdict(self).items()
                if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0)]


@dataclass(frozen=True)
class SurveyPlan:
    robots_required: int
    transit_hops: float
    scan_stops: float
    total_hops: float
    mapping_time: float  # min
    target_resolution: float
    camera_range: float  # m

    def to_dict(self):
        return asdict(self)


class HopCounts(NamedTuple):
    transit: float
    scan: float
    total: float


def robots_required(length, comm_range=COMM_RANGE):
    """Relay robots to span ``length`` m, plus the two base robots.

    ``ceil(length / comm_range) + 2``.
    """
    length = check_positive(length, "length", allow_zero=True)
    comm_range = check_positive(comm_range, "comm_range")
    # round first so exact multiples are not bumped up by float noise
    return math.ceil(round(length / comm_range, 9)) + 2


def hops_required(length, camera_range, comm_range=COMM_RANGE):
    """Fractional hop counts: transit hops every ``comm_range`` metres plus
    scan hops every ``2 * camera_range`` metres."""
    length = check_positive(length, "length", allow_zero=True)
    camera_range = check_positive(camera_range, "camera_range")
    comm_range = check_positive(comm_range, "comm_range")
    transit = length / comm_range
    scan = length / (2.0 * camera_range)
    return HopCounts(transit, scan, transit + scan)


def mapping_time(length, camera_range, t_h1=HOP_TIME_TRANSIT, t_h2=HOP_TIME_SCAN,
                 comm_range=COMM_RANGE, include_hop_count=False, scan_minutes=SCAN_MINUTES):
    """Minutes to map a cave of ``length`` m at a given camera range.

    ``(d / comm_range) * t_h1 + (d / 2R) * (t_h2 + scan_minutes)``. With
    ``include_hop_count`` the total hop count is added on top, as in the
    literal form of the model; that variant cannot be fitted to the
    reference table with non-negative hop times.
    """
    t_h1 = check_positive(t_h1, "t_h1", allow_zero=True)
    t_h2 = check_positive(t_h2, "t_h2", allow_zero=True)
    hops = hops_required(length, camera_range, comm_range)
    total = hops.transit * t_h1 + hops.scan * (t_h2 + scan_minutes)
    if include_hop_count:
        total += hops.total
    return total


def plan_survey(cave, camera, target_resolution, t_h1=HOP_TIME_TRANSIT, t_h2=HOP_TIME_SCAN,
                include_hop_count=False):
    """Size a survey of ``cave`` at ``target_resolution`` with ``camera``."""
    target_resolution = check_positive(target_resolution, "target_resolution")
    cam_range = range_for_resolution(camera, target_resolution)
    hops = hops_required(cave.length, cam_range, cave.comm_range)
    return SurveyPlan(
        robots_required=robots_required(cave.length, cave.comm_range),
        transit_hops=hops.transit,
        scan_stops=hops.scan,
        total_hops=hops.total,
        mapping_time=mapping_time(cave.length, cam_range, t_h1, t_h2, cave.comm_range,
                                  include_hop_count),
        target_resolution=target_resolution,
        camera_range=cam_range,
    )


class MappingTimeModel(RegressorMixin, BaseEstimator):
    """Least-squares fit of the per-hop times to observed mapping times.

    ``X`` has two columns, cave length (m) and camera range (m); ``y`` is
    mapping time in minutes. The model is linear in the two hop times, so
    the fit is an ordinary least-squares solve.

    Parameters
    ----------
    comm_range : float, default=30.0
        Relay spacing in metres.
    scan_minutes : float, default=1.0
        Panorama time per scan stop.
    include_hop_count : bool, default=False
        Add the raw hop count to the predicted time.

    Attributes
    ----------
    t_h1_ : float
        Fitted minutes per transit hop.
    t_h2_ : float
        Fitted minutes per scan hop.
    """

    def __init__(self, comm_range=COMM_RANGE, scan_minutes=SCAN_MINUTES, include_hop_count=False):
        self.comm_range = comm_range
        self.scan_minutes = scan_minutes
        self.include_hop_count = include_hop_count

    def _design(self, X):
        d, r = X[:, 0], X[:, 1]
        transit = d / self.comm_range
        scan = d / (2.0 * r)
        offset = scan * self.scan_minutes
        if self.include_hop_count:
            offset = offset + transit + scan
        return np.column_stack([transit, scan]), offset

    def fit(self, X, y):
        X, y = validate_data(self, X, y, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"X must have 2 columns (length, camera range), got {X.shape[1]}")
        if np.any(X <= 0):
            raise ValueError("cave lengths and camera ranges must be > 0")
        A, offset = self._design(X)
        coef, *_ = np.linalg.lstsq(A, y - offset, rcond=None)
        self.t_h1_, self.t_h2_ = float(coef[0]), float(coef[1])
        return self

    def predict(self, X):
        check_is_fitted(self, ["t_h1_", "t_h2_"])
        X = validate_data(self, X, dtype=float, reset=False)
        A, offset = self._design(X)
        return A @ np.array([self.t_h1_, self.t_h2_]) + offset


def reference_table_rows(camera, t_h1=HOP_TIME_TRANSIT, t_h2=HOP_TIME_SCAN, include_hop_count=False):
    """Recompute every cell of the reference survey table.

    Yields dicts with the columns of the survey CSV export.
    """
    for res, ref_times in zip(REFERENCE_RESOLUTIONS,
                              zip(*(REFERENCE_TIMES[d] for d in REFERENCE_LENGTHS))):
        cam_range = range_for_resolution(camera, res)
        for length, ref_time in zip(REFERENCE_LENGTHS, ref_times):
            minutes = mapping_time(length, cam_range, t_h1, t_h2, COMM_RANGE, include_hop_count)
            yield {
                "resolution": res,
                "camera_range_m": cam_range,
                "cave_length_m": length,
                "robots": robots_required(length),
                "map_time_min": minutes,
                "paper_time_min": ref_time,
                "relative_error": (minutes - ref_time) / ref_time,
            }
