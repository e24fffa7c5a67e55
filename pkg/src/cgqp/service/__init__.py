from . import models
from .main import app

__all__ = ["app", "models"]
