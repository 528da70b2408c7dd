"""geoagent: geoscience tool server, ReAct episode engine, and trajectory evaluation."""

__version__ = "0.1.0"
