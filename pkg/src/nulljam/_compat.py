"""Small numpy version shims."""

try:
    from numpy import trapezoid
except ImportError:  # numpy < 2.0
    from numpy import trapz as trapezoid

__all__ = ["trapezoid"]
