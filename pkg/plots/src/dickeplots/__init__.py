"""Figure generation for dickespec artifacts; no physics is recomputed here."""

__version__ = "0.1.0"
