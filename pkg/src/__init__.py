"""WL CDMA Games - transceiver games with widely-linear receivers for synchronous CDMA uplinks."""

__version__ = "0.3.0"
