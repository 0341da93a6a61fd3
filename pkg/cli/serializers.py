from django.core.management.base import CommandError
from rest_framework import serializers

from raster.exceptions import InvalidGrid
from raster.grid import Grid
from regionkit.conf import region_setting
from regions.algebra import validate_sharpness
from regions.exceptions import InvalidSharpness
from setlang.serializers import WindowSerializer, first_error

WINDOW_FIELDS = ('x_min', 'x_max', 'y_min', 'y_max')


def validated(serializer_class, **data):
    """
    Run ``serializer_class`` over the options that were given.

    Options left at None are dropped so field defaults apply; a validation
    failure becomes a CommandError.
    """
    serializer = serializer_class(data={key: value for key, value in data.items() if value is not None})
    if not serializer.is_valid():
        raise CommandError(first_error(serializer.errors))
    return serializer


# ============================================================================
# Option serializers
# ============================================================================

class GridOptionsSerializer(serializers.Serializer):
    """Validates ``--grid``, ``--resolution``, ``--workers`` and ``--boundary-tol``."""

    grid = serializers.ListField(
        child=serializers.FloatField(), min_length=4, max_length=4, required=False
    )
    resolution = serializers.ListField(
        child=serializers.IntegerField(min_value=1), min_length=1, max_length=2, required=False
    )
    workers = serializers.IntegerField(min_value=1, required=False)
    boundary_tol = serializers.FloatField(min_value=0, required=False)

    def validate_grid(self, value):
        """Validate the window the same way a program's ``window`` directive is."""
        window = WindowSerializer(data=dict(zip(WINDOW_FIELDS, value)))
        if not window.is_valid():
            raise serializers.ValidationError(first_error(window.errors))
        return window.as_tuple()

    def build_grid(self, program=None):
        """The grid to sample: explicit window, else the program's, else the default."""
        data = self.validated_data
        window = data.get('grid') or getattr(program, 'window', None) or region_setting('DEFAULT_WINDOW')
        resolution = data.get('resolution') or [region_setting('DEFAULT_RESOLUTION')]
        try:
            return Grid.from_window(window, *resolution)
        except InvalidGrid as error:
            raise CommandError(str(error))


class SharpnessListSerializer(serializers.Serializer):
    """Validates a comma separated ``--a-list``."""

    a_list = serializers.CharField()

    def validate_a_list(self, value):
        values = []
        for part in value.split(','):
            try:
                number = float(part)
            except ValueError:
                raise serializers.ValidationError(f"Not a number: {part.strip()!r}")
            try:
                values.append(validate_sharpness(number))
            except InvalidSharpness as error:
                raise serializers.ValidationError(str(error))
        return values


class GradientCheckSerializer(serializers.Serializer):
    points = serializers.IntegerField(min_value=1, max_value=1_000_000)
    seed = serializers.IntegerField(min_value=0)
    tolerance = serializers.FloatField(min_value=0, required=False)
    margin = serializers.FloatField(min_value=0, required=False)

    def validate(self, attrs):
        attrs.setdefault('tolerance', region_setting('GRADCHECK_TOL'))
        attrs.setdefault('margin', region_setting('GRADCHECK_MARGIN'))
        return attrs


class DemoOptionsSerializer(serializers.Serializer):
    resolution = serializers.IntegerField(min_value=1, required=False)
    workers = serializers.IntegerField(min_value=1, required=False)

    def validate(self, attrs):
        attrs.setdefault('resolution', region_setting('DEFAULT_RESOLUTION'))
        return attrs
