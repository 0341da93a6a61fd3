"""
Access to the ``REGION_ALGEBRA`` settings dict.

The algebra also runs without a configured Django project (plain library use),
in which case the built-in defaults apply.
"""
from django.conf import settings

DEFAULTS = {
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
    'PROGRAMS_DIR': None,
}


def region_setting(name):
    """Return a REGION_ALGEBRA setting, falling back to the default."""
    if name not in DEFAULTS:
        raise KeyError(f"Unknown REGION_ALGEBRA setting: {name}")
    if not settings.configured:
        return DEFAULTS[name]
    return getattr(settings, 'REGION_ALGEBRA', {}).get(name, DEFAULTS[name])
