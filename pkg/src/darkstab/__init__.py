"""Dark-state destabilization in multilevel atoms: angular-momentum algebra,
polarization-modulated fields, dark-state spaces, optical Bloch equations,
closed-form reference models and a scan harness."""
from importlib.metadata import PackageNotFoundError, version as _version

from . import amcore, darkstates, fields, models, obe

try:
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = ["amcore", "fields", "darkstates", "obe", "models", "__version__"]
