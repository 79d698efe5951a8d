"""Pytest wiring: use the bundled test project's Django settings."""

import os
import sys

import django

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)),
                                'test_project'))
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'test_project.settings')
django.setup()
