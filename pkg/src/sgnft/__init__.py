"""Direct nonlinear Fourier transforms for the sine-Gordon equation on the half-line."""

__version__ = "0.1.0"
