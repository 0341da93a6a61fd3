from django.core.management.base import BaseCommand, CommandError

from cli.checks import gradient_check
from cli.options import load, sharpness_option
from cli.serializers import WINDOW_FIELDS, GradientCheckSerializer, validated
from regionkit.conf import region_setting
from setlang.compiler import compile_program
from setlang.serializers import WindowSerializer, first_error


class Command(BaseCommand):
    help = "Compare exact gradients of a program's log-field with central differences."

    def add_arguments(self, parser):
        parser.add_argument('program', help="Program file or bundled program name")
        parser.add_argument('--points', default='100', help="Points to check")
        parser.add_argument('--seed', default='0', help="Seed for drawing the points")
        parser.add_argument('--sharpness', help="Use this sharpness for every set")
        parser.add_argument('--tolerance', help="Largest accepted relative error")
        parser.add_argument('--margin', help="Skip points this close to the boundary or a kink")
        parser.add_argument(
            '--grid', nargs=4, metavar=('X_MIN', 'X_MAX', 'Y_MIN', 'Y_MAX'),
            help="Window to draw points from (default: the program's window)",
        )

    def handle(self, *args, **options):
        program = load(options['program'])
        limits = validated(
            GradientCheckSerializer,
            points=options['points'],
            seed=options['seed'],
            tolerance=options['tolerance'],
            margin=options['margin'],
        ).validated_data
        window = program.window or region_setting('DEFAULT_WINDOW')
        if options['grid']:
            serializer = WindowSerializer(data=dict(zip(WINDOW_FIELDS, options['grid'])))
            if not serializer.is_valid():
                raise CommandError(first_error(serializer.errors))
            window = serializer.as_tuple()

        region = compile_program(program, sharpness_override=sharpness_option(options['sharpness']))
        report = gradient_check(
            region, window, limits['points'], limits['seed'],
            tolerance=limits['tolerance'], margin=limits['margin'],
        )

        self.stdout.write('requested\tchecked\texcluded\tmax_rel_error\ttolerance\tresult')
        self.stdout.write(
            f'{report.requested}\t{report.checked}\t{report.excluded}\t'
            f'{report.max_error:.3e}\t{report.tolerance:g}\t{"pass" if report.passed else "fail"}'
        )
        if report.checked < report.requested:
            raise CommandError(
                f"Only {report.checked} of {report.requested} points passed the exclusion rules",
                returncode=2,
            )
        if not report.passed:
            raise CommandError(
                f"Largest relative error {report.max_error:.3e} at ({report.worst.x:.6g}, {report.worst.y:.6g})",
                returncode=2,
            )
