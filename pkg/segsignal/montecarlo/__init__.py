__all__ = []



from . import seeds
__all__.extend( seeds.__all__ )
from .seeds import *

from . import config
__all__.extend( config.__all__ )
from .config import *

from . import engine
__all__.extend( engine.__all__ )
from .engine import *
