import math

from rest_framework import serializers

from expressions.exceptions import ExpressionSyntaxError
from expressions.parser import parse_scalar
from regions.algebra import validate_sharpness
from regions.exceptions import InvalidSharpness

from .nodes import PROGRAM_ALPHABET


def _sharpness(value):
    try:
        return validate_sharpness(value)
    except InvalidSharpness as error:
        raise serializers.ValidationError(str(error))


# ============================================================================
# Program directive serializers
# ============================================================================

class DefinitionSerializer(serializers.Serializer):
    """Validates a ``def`` directive; ``body`` comes back parsed."""

    name = serializers.CharField()
    a = serializers.FloatField(required=False, allow_null=True)
    body = serializers.CharField()

    def validate_name(self, value):
        """Validate the name is one letter of the program alphabet."""
        if len(value) != 1 or value not in PROGRAM_ALPHABET:
            raise serializers.ValidationError(
                f"Set name must be one letter from a to w, got {value!r}"
            )
        return value

    def validate_a(self, value):
        if value is None:
            return None
        return _sharpness(value)

    def validate_body(self, value):
        """Validate the body parses as a scalar expression."""
        try:
            return parse_scalar(value)
        except ExpressionSyntaxError as error:
            raise serializers.ValidationError(str(error))


class SharpnessSerializer(serializers.Serializer):
    sharpness = serializers.FloatField()

    def validate_sharpness(self, value):
        return _sharpness(value)


class WindowSerializer(serializers.Serializer):
    """Validates a plotting window."""

    x_min = serializers.FloatField()
    x_max = serializers.FloatField()
    y_min = serializers.FloatField()
    y_max = serializers.FloatField()

    def validate(self, attrs):
        """Validate the bounds are finite and ordered."""
        if not all(math.isfinite(value) for value in attrs.values()):
            raise serializers.ValidationError("Window bounds must be finite")
        if attrs['x_min'] >= attrs['x_max'] or attrs['y_min'] >= attrs['y_max']:
            raise serializers.ValidationError("Window needs x_min < x_max and y_min < y_max")
        return attrs

    def as_tuple(self):
        data = self.validated_data
        return (data['x_min'], data['x_max'], data['y_min'], data['y_max'])


def first_error(errors):
    """One line out of a DRF error dict."""
    field, messages = next(iter(errors.items()))
    message = messages[0] if isinstance(messages, list) else messages
    if field == 'non_field_errors':
        return str(message)
    return f"{field}: {message}"
