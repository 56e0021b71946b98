"""Almost Einstein (2,3,5) distributions: exact fiber algebra, jet geometry and worked examples."""
from .config import conf
from .errors import G2ScaleError
from .g2core import G2Structure, standard_structure
from .scalars import ExactScalar

__version__ = conf.version

__all__ = ["ExactScalar", "G2ScaleError", "G2Structure", "conf", "standard_structure", "__version__"]
