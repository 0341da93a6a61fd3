import logging

from django.core.management.base import BaseCommand, CommandError

from cli.options import add_grid_arguments, grid_options, load, sharpness_option
from raster.contours import marching_squares
from raster.exceptions import RasterError
from raster.export import bitmap_checksum, write_pgm, write_svg
from raster.sampling import sample_membership
from setlang.compiler import compile_program

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = "Rasterise a set program to a PGM bitmap and optionally an SVG contour."

    def add_arguments(self, parser):
        parser.add_argument('program', help="Program file or bundled program name")
        add_grid_arguments(parser)
        parser.add_argument('--sharpness', help="Use this sharpness for every set")
        parser.add_argument('--boundary-tol', help="Log-field values up to this count as inside")
        parser.add_argument('--out', help="PGM output path")
        parser.add_argument('--contour', help="SVG output path for the boundary")

    def handle(self, *args, **options):
        program = load(options['program'])
        serializer = grid_options(options, boundary_tol=options['boundary_tol'])
        grid = serializer.build_grid(program)
        region = compile_program(program, sharpness_override=sharpness_option(options['sharpness']))
        logger.debug("Rendering %s on %dx%d cells", options['program'], grid.nx, grid.ny)

        try:
            bitmap = sample_membership(
                region, grid,
                workers=serializer.validated_data.get('workers'),
                boundary_tol=serializer.validated_data.get('boundary_tol'),
            )
            if options['out']:
                write_pgm(bitmap, options['out'])
            if options['contour']:
                write_svg(marching_squares(region, grid), options['contour'])
        except RasterError as error:
            raise CommandError(str(error))

        self.stdout.write('cells\tinside\tundefined\tinside_fraction\tchecksum')
        self.stdout.write(
            f'{grid.cells}\t{bitmap.inside_cells}\t{bitmap.undefined_cells}\t'
            f'{bitmap.inside_fraction:.6f}\t{bitmap_checksum(bitmap)}'
        )
