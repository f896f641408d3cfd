from .oracles import disk_eigenvalues, disk_roots, sphere_eigenvalue
from .prufer import PruferState, prufer_flow
from .spectrum import EigenPair, eigenfunction, eigenvalue, nodal_count, spectrum

__all__ = [
    "EigenPair",
    "PruferState",
    "disk_eigenvalues",
    "disk_roots",
    "eigenfunction",
    "eigenvalue",
    "nodal_count",
    "prufer_flow",
    "spectrum",
    "sphere_eigenvalue",
]
