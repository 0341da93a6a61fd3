import os
from pathlib import Path

BASE_DIR = Path(__file__).resolve().parent.parent
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'regionkit-local-only')

DEBUG = False

ALLOWED_HOSTS = []


INSTALLED_APPS = [
    'expressions.apps.ExpressionsConfig',
    'regions.apps.RegionsConfig',
    'setlang.apps.SetlangConfig',
    'raster.apps.RasterConfig',
    'cli.apps.CliConfig',
    'rest_framework',
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [],
        },
    },
]

# No persistence; every command works on files and stdout.
DATABASES = {}


# Internationalization
# https://docs.djangoproject.com/en/4.2/topics/i18n/

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging
# https://docs.djangoproject.com/en/4.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        name: {
            'handlers': ['console'],
            'level': os.environ.get('DJANGO_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        }
        for name in ('expressions', 'regions', 'setlang', 'raster', 'cli')
    },
}

# Django REST Framework
REST_FRAMEWORK = {
    'UNAUTHENTICATED_USER': None,
}

# Region algebra settings
REGION_ALGEBRA = {
    'DEFAULT_SHARPNESS': 50.0,
    'BOUNDARY_TOL': 1e-9,
    'MAX_GRID_CELLS': 16_000_000,
    'LOSS_CLIP': 1e6,
    'SAMPLING_WORKERS': 1,
    'INTEGER_EXPONENT_TOL': 1e-9,
    'GRADCHECK_STEP': 1e-5,
    'GRADCHECK_TOL': 1e-5,
    'GRADCHECK_MARGIN': 1e-3,
    'FIELD_CLAMP': 700.0,
    'DEFAULT_WINDOW': (-4.0, 4.0, -4.0, 4.0),
    'DEFAULT_RESOLUTION': 512,
    'PROGRAMS_DIR': BASE_DIR / 'cli' / 'programs',
}
