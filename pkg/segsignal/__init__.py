__all__ = []

import os, json

from typing import Dict
from rich_argparse import RichHelpFormatter

def get_argparser_formatter():
  RichHelpFormatter.styles["argparse.args"]     = "green"
  RichHelpFormatter.styles["argparse.prog"]     = "bold grey50"
  RichHelpFormatter.styles["argparse.groups"]   = "bold green"
  RichHelpFormatter.styles["argparse.help"]     = "grey50"
  RichHelpFormatter.styles["argparse.metavar"]  = "blue"
  return RichHelpFormatter

def load_json(path : str) -> Dict:
    with open(path,'r') as f:
        return json.load(f)

def get_experiments_path() -> str:
    """
    Directory holding the shipped experiment configurations (data/experiments).
    """
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return f"{root}/data/experiments"

from . import model
__all__.extend( model.__all__ )
from .model import *

from . import detection
__all__.extend( detection.__all__ )
from .detection import *

from . import estimation
__all__.extend( estimation.__all__ )
from .estimation import *

from . import analytics
__all__.extend( analytics.__all__ )
from .analytics import *

from . import montecarlo
__all__.extend( montecarlo.__all__ )
from .montecarlo import *
