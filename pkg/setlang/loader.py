"""
Program files.

One directive per line, ``#`` starts a comment line::

    sharpness 50
    window -3 5 -4 4
    def a : x^2+y^2-4
    def b a=20 : (x-2.5)^2+y^2-4
    expr postfix ab|

``expr infix a|b`` is the infix spelling. Exactly one ``expr`` is required.
"""
import logging
import re
from pathlib import Path

from regionkit.conf import region_setting

from .exceptions import FileFormatError, SetSyntaxError
from .nodes import Definition, SetProgram, referenced_names
from .parsers import parse_infix, parse_postfix
from .serializers import DefinitionSerializer, SharpnessSerializer, WindowSerializer, first_error

logger = logging.getLogger(__name__)

DEF_RE = re.compile(r'^def\s+(?P<name>[^\s:]+)\s*(?:a\s*=\s*(?P<a>[^\s:]+)\s*)?:(?P<body>.*)$')
EXPR_RE = re.compile(r'^expr\s+(?P<syntax>\S+)(?:\s+(?P<text>.*))?$')

PROGRAM_SUFFIX = '.set'


class ProgramBuilder:
    """Collects directives line by line and checks the result."""

    def __init__(self):
        self.definitions = {}
        self.global_a = None
        self.window = None
        self.expression = None
        self.expression_line = None

    def feed(self, number, line):
        keyword = line.split(None, 1)[0]
        handler = getattr(self, f'directive_{keyword}', None)
        if handler is None:
            raise FileFormatError(number, f"Unknown directive {keyword!r}")
        handler(number, line)

    def directive_def(self, number, line):
        match = DEF_RE.match(line)
        if not match:
            raise FileFormatError(number, "Expected 'def <letter> [a=<sharpness>] : <expression>'")
        data = {'name': match['name'], 'body': match['body'].strip()}
        if match['a'] is not None:
            data['a'] = match['a']
        serializer = DefinitionSerializer(data=data)
        if not serializer.is_valid():
            raise FileFormatError(number, first_error(serializer.errors))
        name = serializer.validated_data['name']
        if name in self.definitions:
            raise FileFormatError(number, f"Duplicate definition of '{name}'")
        self.definitions[name] = Definition(
            name, serializer.validated_data['body'], serializer.validated_data.get('a')
        )

    def directive_sharpness(self, number, line):
        parts = line.split()
        if len(parts) != 2:
            raise FileFormatError(number, "Expected 'sharpness <positive real>'")
        serializer = SharpnessSerializer(data={'sharpness': parts[1]})
        if not serializer.is_valid():
            raise FileFormatError(number, first_error(serializer.errors))
        self.global_a = serializer.validated_data['sharpness']

    def directive_window(self, number, line):
        parts = line.split()
        if len(parts) != 5:
            raise FileFormatError(number, "Expected 'window <x_min> <x_max> <y_min> <y_max>'")
        serializer = WindowSerializer(data=dict(zip(('x_min', 'x_max', 'y_min', 'y_max'), parts[1:])))
        if not serializer.is_valid():
            raise FileFormatError(number, first_error(serializer.errors))
        self.window = serializer.as_tuple()

    def directive_expr(self, number, line):
        if self.expression is not None:
            raise FileFormatError(number, f"Second expr directive (first on line {self.expression_line})")
        match = EXPR_RE.match(line)
        if not match or match['syntax'] not in ('postfix', 'infix'):
            raise FileFormatError(number, "Expected 'expr postfix <text>' or 'expr infix <text>'")
        text = (match['text'] or '').strip()
        if not text:
            raise FileFormatError(number, "Empty set expression")
        reader = parse_postfix if match['syntax'] == 'postfix' else parse_infix
        try:
            self.expression = reader(text)
        except SetSyntaxError as error:
            raise FileFormatError(number, str(error))
        self.expression_line = number

    def build(self, last_line):
        if self.expression is None:
            raise FileFormatError(last_line, "Missing expr directive")
        for name in referenced_names(self.expression):
            if name not in self.definitions:
                raise FileFormatError(self.expression_line, f"Set '{name}' has no definition")
        return SetProgram(
            tuple(self.definitions.values()), self.expression, self.global_a, self.window
        )


def parse_program(text):
    """Parse program text into a SetProgram, raising FileFormatError."""
    builder = ProgramBuilder()
    lines = text.splitlines()
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        builder.feed(number, line)
    program = builder.build(len(lines))
    logger.debug("Loaded program with sets %s", ''.join(program.table))
    return program


def load_program(source):
    """Load a program from a path or an open text stream."""
    if hasattr(source, 'read'):
        return parse_program(source.read())
    return parse_program(Path(source).read_text(encoding='utf-8'))


# ============================================================================
# Bundled programs
# ============================================================================

def programs_dir():
    directory = region_setting('PROGRAMS_DIR')
    if directory is None:
        return Path(__file__).resolve().parent.parent / 'cli' / 'programs'
    return Path(directory)


def bundled_programs():
    """Names of the programs shipped with the project."""
    return sorted(path.stem for path in programs_dir().glob(f'*{PROGRAM_SUFFIX}'))


def resolve_program(argument):
    """A path to an existing file, or the path of the bundled program named ``argument``."""
    path = Path(argument)
    if path.is_file():
        return path
    bundled = programs_dir() / f'{argument}{PROGRAM_SUFFIX}'
    if bundled.is_file():
        return bundled
    raise FileFormatError(0, f"No program file or bundled program named {argument!r}")
