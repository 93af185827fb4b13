"""AxWin Transformer backbone on a small numpy autograd substrate, with cost analysis."""

__version__ = "0.1.0"
