"""
Option handling shared by the management commands.
"""
from django.core.management.base import CommandError

from setlang.exceptions import SetLanguageError
from setlang.loader import load_program, resolve_program
from setlang.serializers import SharpnessSerializer

from .serializers import GridOptionsSerializer, validated


def load(argument):
    """Load a program file or bundled program, failing with a CommandError."""
    try:
        path = resolve_program(argument)
        return load_program(path)
    except SetLanguageError as error:
        raise CommandError(f"{argument}: {error}")
    except OSError as error:
        raise CommandError(f"Cannot read {argument}: {error.strerror}")


def sharpness_option(value):
    """The ``--sharpness`` override as a float, or None when not given."""
    if value is None:
        return None
    return validated(SharpnessSerializer, sharpness=value).validated_data['sharpness']


def add_grid_arguments(parser):
    parser.add_argument(
        '--grid', nargs=4, metavar=('X_MIN', 'X_MAX', 'Y_MIN', 'Y_MAX'),
        help="Sampling window (default: the program's window)",
    )
    parser.add_argument(
        '--resolution', nargs='+', metavar='N',
        help="Cells along x, and optionally along y (default: square)",
    )
    parser.add_argument('--workers', help="Threads used for sampling")


def grid_options(options, **extra):
    """Validated grid options; ``build_grid`` turns them into a Grid."""
    return validated(
        GridOptionsSerializer,
        grid=options['grid'],
        resolution=options['resolution'],
        workers=options['workers'],
        **extra,
    )
