"""Publication-style figures from derham-gap CSV logs.

This package reads only the documented CSV schemas; every number shown in a
figure (fitted slopes, decay rates) is recomputed from the CSV text, so the
figures are reproducible from the logs alone.
"""

__version__ = "0.1.0"
