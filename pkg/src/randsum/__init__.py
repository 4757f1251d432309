"""Normal approximation error bounds for random sums via size-bias and zero-bias couplings."""

__version__ = "0.1.0"
