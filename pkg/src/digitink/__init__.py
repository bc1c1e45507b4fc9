"""digitink: online recognition of finger- and thumb-drawn digits.

Two small ConvNets share one engine: a 2D model reading 28x28 bitmaps of
the drawn glyph and a 1D model reading the polar displacement vectors
between successive touch points.  The package also ships the stroke
preprocessing pipeline, a canonical dataset format with a synthetic
generator, a from-scratch training stack, an HTTP inference service and a
command-line front end.
"""

__version__ = "0.1.0"
