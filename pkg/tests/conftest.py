from hypothesis import settings

# several properties run quadratures or eigen-solves; wall time varies with load
settings.register_profile("default", deadline=None)
settings.load_profile("default")
