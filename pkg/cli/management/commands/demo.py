import os

from django.core.management.base import BaseCommand, CommandError

from cli.demos import DEMOS, DemoRun
from cli.serializers import DemoOptionsSerializer, validated
from raster.exceptions import RasterError


class Command(BaseCommand):
    help = "Run one of the bundled demos end to end, writing images to --out-dir."

    def add_arguments(self, parser):
        parser.add_argument('name', choices=sorted(DEMOS))
        parser.add_argument('--out-dir', default='.', help="Directory for the images")
        parser.add_argument('--resolution', help="Cells per side (default: DEFAULT_RESOLUTION)")
        parser.add_argument('--workers', help="Threads used for sampling")

    def handle(self, *args, **options):
        data = validated(
            DemoOptionsSerializer, resolution=options['resolution'], workers=options['workers']
        ).validated_data
        try:
            os.makedirs(options['out_dir'], exist_ok=True)
        except OSError as error:
            raise CommandError(f"Cannot create {options['out_dir']}: {error.strerror}")

        run = DemoRun(options['out_dir'], data['resolution'], data.get('workers'), self.stdout.write)
        try:
            DEMOS[options['name']](run)
        except RasterError as error:
            raise CommandError(str(error))
        if run.failures:
            raise CommandError(
                f"Demo {options['name']} failed {len(run.failures)} self-check(s): {run.failures[0]}",
                returncode=2,
            )
