from hypothesis import settings

# Table construction on first use makes per-example timing meaningless.
settings.register_profile("default", deadline=None)
settings.load_profile("default")
