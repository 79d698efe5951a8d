"""
Django settings for the django-fixpoints test project.

Run the suite with ``python test_project/manage.py test fixpoints``.
"""

import os
import tempfile

BASE_DIR = os.path.dirname(os.path.dirname(__file__))

SECRET_KEY = 'fixpoints-test-project-not-secret'

DEBUG = True

ALLOWED_HOSTS = []

INSTALLED_APPS = (
    'fixpoints',
)

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {},
    },
]

# no models; the suite only uses SimpleTestCase
DATABASES = {}

USE_TZ = True

FIXPOINTS_ARTIFACTS_DIR = os.path.join(tempfile.gettempdir(),
                                       'fixpoints-test-artifacts')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'fixpoints': {
            'handlers': ['console'],
            'level': os.environ.get('FIXPOINTS_LOG_LEVEL', 'WARNING'),
        },
    },
}
