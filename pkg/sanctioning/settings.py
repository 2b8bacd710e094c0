"""
Django settings for the sanctioning project.

The project has no HTTP surface: it is a library of game-theoretic calculators
driven through management commands. Settings carry the environment-dependent
knobs (worker threads, cache backend, log level) and the numeric defaults the
commands fall back to.
"""
import os
from pathlib import Path
from dotenv import load_dotenv


load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'dev-secret-key-change-in-production')

DEBUG = os.environ.get('DEBUG', 'False') == 'True'

ALLOWED_HOSTS: list[str] = []


# Application definition

INSTALLED_APPS = [
    "reputation",
]

# No persistence: every result is recomputed or written to files.
DATABASES: dict[str, dict[str, str]] = {}

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Worker parallelism for rollouts over seeds and for the APS candidate loop
SANCTION_SIM_THREADS = max(1, int(os.environ.get('SANCTION_SIM_THREADS', '1')))

# Caching configuration: Redis when REDIS_URL is set, process memory otherwise
REDIS_URL = os.environ.get('REDIS_URL')

if REDIS_URL:
    CACHES = {
        'default': {
            'BACKEND': 'django_redis.cache.RedisCache',
            'LOCATION': REDIS_URL,
            'TIMEOUT': None,
            'OPTIONS': {
                'CLIENT_CLASS': 'django_redis.client.DefaultClient',
            },
        }
    }
else:
    CACHES = {
        'default': {
            'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
            'LOCATION': 'sanctioning',
            'TIMEOUT': None,
        }
    }

# Timeout for cached PPE payoff sets (seconds)
CACHE_TTL = int(os.environ.get('CACHE_TTL', '3600'))

# Numeric defaults used by the management commands
PPE_DEFAULT_GRID = 0.02
PPE_DEFAULT_TOL = 1e-9
PPE_DEFAULT_MAX_ITERS = 500
SIM_TAIL_MASS = 1e-12
LICENSE_MULTIPLIER = 10.0

SANCTION_LOG_LEVEL = os.environ.get('SANCTION_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {message}',
            'style': '{',
        },
        'simple': {
            'format': '{levelname} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'reputation': {
            'handlers': ['console'],
            'level': SANCTION_LOG_LEVEL,
            'propagate': False,
        },
    },
}
