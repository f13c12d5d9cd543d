"""Table-grounded faithfulness scoring for chart summaries."""

from ._chats import *  # noqa: F401,F403
from ._chats import __version__  # noqa: F401
