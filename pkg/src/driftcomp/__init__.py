"""driftcomp: temperature-drift compensation for a six-axis F/T sensor."""

__version__ = "0.1.0"
