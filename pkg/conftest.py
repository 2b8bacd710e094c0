import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'sanctioning.settings')
django.setup()
