import os

from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

os.environ.setdefault("CHARVAR_THREADS", "4")
