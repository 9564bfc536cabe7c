"""Digital-twin patch testing with generative synthesis of system data.

The pipeline captures a filesystem image into a sandboxed twin, applies
declarative patches to it, and uses two generative models trained on
recorded system data (process/CPU tables and user-interaction macro
scripts) to synthesize and validate test scenarios against the twin.
"""

from twinforge.errors import TwinforgeError

__version__ = "0.1.0"

__all__ = ["TwinforgeError", "__version__"]
