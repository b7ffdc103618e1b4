"""Two-layer spiking classifier trained with saturating supervised Hebbian learning."""

__version__ = "0.1.0"
