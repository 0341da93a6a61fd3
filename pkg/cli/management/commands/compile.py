from django.core.management.base import BaseCommand, CommandError

from cli.options import load, sharpness_option
from setlang.appendix import replay_appendix
from setlang.compiler import compile_program
from setlang.desmos import emit_desmos
from setlang.exceptions import SetLanguageError
from setlang.loader import programs_dir

APPENDIX_TRANSCRIPT = 'appendix_transcript.txt'


class Command(BaseCommand):
    help = "Compile a set program into one inequality that can be pasted into Desmos."

    def add_arguments(self, parser):
        parser.add_argument('program', nargs='?', help="Program file or bundled program name")
        parser.add_argument(
            '--emit', choices=['desmos', 'latex'], default='desmos',
            help="'latex' re-emits every set body from its parsed form",
        )
        parser.add_argument('--sharpness', help="Use this sharpness for every set")
        parser.add_argument(
            '--appendix', action='store_true',
            help="Replay an interactive-script transcript (the bundled one if no file is given)",
        )
        parser.add_argument(
            '--trace', action='store_true',
            help="With --appendix, print the stack before each symbol",
        )

    def handle(self, *args, **options):
        normalized = options['emit'] == 'latex'
        if options['appendix']:
            if options['sharpness'] is not None:
                raise CommandError("--sharpness cannot be combined with --appendix")
            self.replay(options['program'], options['trace'], normalized)
            return

        if options['trace']:
            raise CommandError("--trace needs --appendix")
        if options['program'] is None:
            raise CommandError("A program file or bundled program name is required")
        program = load(options['program'])
        override = sharpness_option(options['sharpness'])
        try:
            region = compile_program(program, sharpness_override=override)
        except SetLanguageError as error:
            raise CommandError(str(error))
        self.stdout.write(emit_desmos(region, normalized))

    def replay(self, path, trace, normalized):
        path = path or programs_dir() / APPENDIX_TRANSCRIPT
        try:
            with open(path, encoding='utf-8') as stream:
                replay = replay_appendix(stream)
        except OSError as error:
            raise CommandError(f"Cannot read {path}: {error.strerror}")
        except SetLanguageError as error:
            raise CommandError(f"{path}: {error}")

        if trace:
            for line in replay.trace:
                self.stdout.write(line)
        if normalized:
            self.stdout.write(emit_desmos(compile_program(replay.program), normalized=True))
        else:
            self.stdout.write(replay.result)
