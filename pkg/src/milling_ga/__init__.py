"""milling-ga - cost-optimal multi-pass face milling by an elitist binary-coded genetic algorithm."""

__version__ = "0.1.0"
