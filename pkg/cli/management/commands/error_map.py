from django.core.management.base import BaseCommand, CommandError

from cli.options import add_grid_arguments, grid_options, load
from cli.serializers import SharpnessListSerializer, validated
from raster.exceptions import RasterError
from raster.sampling import boolean_oracle, mismatch, sample_membership, sweep_frames
from setlang.compiler import compile_program

QUADRANTS = ('lower_left', 'lower_right', 'upper_left', 'upper_right')


class Command(BaseCommand):
    help = (
        "Print, per sharpness, the fraction of cells where the smooth region "
        "disagrees with the crisp one (or with a second program, see --compare)."
    )

    def add_arguments(self, parser):
        parser.add_argument('program', help="Program file or bundled program name")
        parser.add_argument('--a-list', default='5,10,20,50', help="Comma separated sharpness values")
        parser.add_argument(
            '--compare', metavar='PROGRAM',
            help="Compare with this program compiled at the same sharpness instead of the crisp oracle",
        )
        parser.add_argument(
            '--check', action='store_true',
            help="Fail unless the mismatch never grows along the list, in the order given",
        )
        add_grid_arguments(parser)

    def handle(self, *args, **options):
        program = load(options['program'])
        a_values = validated(SharpnessListSerializer, a_list=options['a_list']).validated_data['a_list']
        serializer = grid_options(options)
        grid = serializer.build_grid(program)
        workers = serializer.validated_data.get('workers')

        try:
            if options['compare']:
                other = load(options['compare'])
                reports = [
                    mismatch(
                        sample_membership(compile_program(program, sharpness_override=a), grid, workers),
                        sample_membership(compile_program(other, sharpness_override=a), grid, workers),
                    )
                    for a in a_values
                ]
            else:
                oracle = boolean_oracle(program, grid)
                reports = [mismatch(frame, oracle) for frame in sweep_frames(program, a_values, grid, workers)]
        except RasterError as error:
            raise CommandError(str(error))

        self.stdout.write('\t'.join(('a', 'mismatch', 'differing_cells') + QUADRANTS))
        for a, report in zip(a_values, reports):
            quadrants = '\t'.join(str(report.quadrants[name]) for name in QUADRANTS)
            self.stdout.write(f'{a:g}\t{report.fraction:.6f}\t{report.differing_cells}\t{quadrants}')

        if options['check']:
            fractions = [report.fraction for report in reports]
            if any(b > a for a, b in zip(fractions, fractions[1:])):
                raise CommandError("Mismatch grew along the sharpness list", returncode=2)
