from django.apps import AppConfig


class FixpointsConfig(AppConfig):
    name = 'fixpoints'
    verbose_name = 'Fixpoints'
