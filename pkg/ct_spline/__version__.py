__version__ = "20.10"
