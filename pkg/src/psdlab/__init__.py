"""psdlab: exact tools for sum-of-squares cones and their Gram filtrations."""

__version__ = "0.1.0"
