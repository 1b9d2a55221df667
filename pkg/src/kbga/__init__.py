"""Grid-encoded genetic path planning for a point robot among convex obstacle groups."""
__version__ = "0.1.0"
