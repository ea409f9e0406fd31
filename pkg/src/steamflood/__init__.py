"""Steam-flood production forecasting and steam-allocation optimization."""

__version__ = "0.1.0"
