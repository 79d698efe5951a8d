""" conf.py, part of django-fixpoints, reads the FIXPOINTS_* settings
lazily so the computational modules work with or without a configured
Django project.
"""

import os


class AppSettings(object):
    """ Settings proxy. Every value falls back to its documented
    default when Django is not configured or the setting is absent.
    """

    def __init__(self, prefix):
        self.prefix = prefix

    def _setting(self, name, default):
        from django.conf import settings
        if not settings.configured:
            return default
        return getattr(settings, self.prefix + name, default)

    @property
    def EXHAUSTIVE_CAP(self):
        return self._setting('EXHAUSTIVE_CAP', 25)

    @property
    def DPLL_MAX_VARS(self):
        return self._setting('DPLL_MAX_VARS', 5000)

    @property
    def SIMULATION_FUEL(self):
        return self._setting('SIMULATION_FUEL', 1000000)

    @property
    def QUINE_ROUNDS(self):
        return self._setting('QUINE_ROUNDS', 3)

    @property
    def T_START(self):
        return self._setting('T_START', 4)

    @property
    def SOLVER_CMD(self):
        return self._setting('SOLVER_CMD', None)

    @property
    def SOLVER_TIMEOUT(self):
        return self._setting('SOLVER_TIMEOUT', 60)

    @property
    def PYSAT_SOLVER(self):
        return self._setting('PYSAT_SOLVER', 'glucose4')

    @property
    def ARTIFACTS_DIR(self):
        # the environment wins so scripted runs can redirect artifacts
        # without touching settings.
        env = os.environ.get(self.prefix + 'ARTIFACTS_DIR')
        if env:
            return env
        return self._setting('ARTIFACTS_DIR', 'fixpoints-artifacts')


app_settings = AppSettings('FIXPOINTS_')
