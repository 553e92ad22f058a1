"""Propellant records and the bundled propellant database."""

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .._validation import raise_if

DEFAULT_GAMMA = 1.2


@dataclass(frozen=True)
class PropellantSpec:
    """Thermochemical summary of a propellant combination.

    ``reference_isp`` and ``reference_flight_time`` carry published values
    for comparison only; nothing in the models reads them.
    """

    name: str
    molecular_weight: float  # kg/kmol
    combustion_temperature: float  # K
    gamma: float = DEFAULT_GAMMA
    fuel: Optional[str] = None
    oxidizer: Optional[str] = None
    category: str = "unspecified"
    reference_isp: Optional[float] = None  # s
    reference_flight_time: Optional[float] = None  # s

    def __post_init__(self):
        self.validate()

    def problems(self):
        out = []
        for field in ("molecular_weight", "combustion_temperature"):
            value = getattr(self, field)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                out.append(f"{field} must be > 0, got {value!r}")
        if not (isinstance(self.gamma, (int, float)) and 1.0 < self.gamma < 2.0):
            out.append(f"gamma must lie in (1, 2), got {self.gamma!r}")
        return out

    def validate(self):
        raise_if([f"{self.name}: {p}" for p in self.problems()])

    def to_dict(self):
        return asdict(self)


def load_propellants(path=None):
    """Read a JSON array of propellant records.

    With no ``path`` the database shipped inside the package is used.
    """
    if path is None:
        text = resources.files("hopbot.propulsion").joinpath("data/propellants.json").read_text()
    else:
        text = Path(path).read_text()
    return [PropellantSpec(**record) for record in json.loads(text)]


def get_propellant(name, path=None):
    for prop in load_propellants(path):
        if prop.name == name:
            return prop
    raise KeyError(f"no propellant named {name!r}")
