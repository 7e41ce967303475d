"""Classical and spectral finite-element band structures of 2D phononic crystal cells."""
from .basis import ElementSpec
from .bloch import WaveVector
from .cellmesh import Bilayer, Homogeneous, MatrixInclusion, MatrixPore, UnitCell
from .elasticity import ALUMINUM, BRASS, Material
from .sweep import PathSpec, compare_to_oracle, compute_dispersion

__all__ = [
    "ALUMINUM", "BRASS", "Bilayer", "ElementSpec", "Homogeneous", "Material", "MatrixInclusion",
    "MatrixPore", "PathSpec", "UnitCell", "WaveVector", "compare_to_oracle", "compute_dispersion",
]
__version__ = "0.1.0"
