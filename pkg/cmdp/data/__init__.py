from .cmdpformat import write_cmdp, read_cmdp, FormatError
from .scene import Scene
