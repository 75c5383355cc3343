__all__ = [
    "scalars",
    "series",
    "coefficients",
    "operators",
    "eigenfunctions",
    "verification",
    "cli",
]
