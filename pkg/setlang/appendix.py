"""
Replay of the interactive Desmos script's prompt/answer protocol.

A transcript holds the sharpness answer, one ``<letter> <body>`` line per
set, a blank line, and the postfix expression. The prompts themselves are
optional. Anything after the expression line is ignored, so a full session
log can be replayed as is.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

from expressions.exceptions import ExpressionSyntaxError
from expressions.parser import parse_scalar

from .compiler import compile_expression, compile_program
from .desmos import desmos_body, emit_desmos
from .exceptions import SetLanguageError, TranscriptError
from .nodes import APPENDIX_ALPHABET, Definition, SetProgram, VarRef
from .parsers import parse_postfix

logger = logging.getLogger(__name__)

SHARPNESS_PROMPT = 'Enter the sharpness factor:'
DEFINITIONS_PROMPT = 'Enter the expressions:'
EXPRESSION_PROMPT = 'Enter the expression:'


@dataclass(frozen=True)
class AppendixReplay:
    program: SetProgram
    trace: Tuple[str, ...]
    result: str

    @property
    def lines(self):
        return self.trace + (self.result,)


def _answer(line, prompt):
    stripped = line.strip()
    if stripped.startswith(prompt):
        return stripped[len(prompt):].strip()
    return stripped


def read_transcript(stream):
    """Parse a transcript into ``(program, postfix text)``, keeping each body verbatim."""
    lines = stream.read().splitlines()
    numbered = iter(enumerate(lines, start=1))

    def next_line():
        item = next(numbered, None)
        if item is None:
            raise TranscriptError(len(lines), "Transcript ended early")
        return item

    number, line = next_line()
    while not line.strip():
        number, line = next_line()
    try:
        global_a = float(_answer(line, SHARPNESS_PROMPT))
    except ValueError:
        raise TranscriptError(number, f"Sharpness must be a number, got {line.strip()!r}")
    if not (math.isfinite(global_a) and global_a > 0):
        raise TranscriptError(number, f"Sharpness must be positive and finite, got {global_a}")

    definitions = {}
    number, line = next_line()
    if line.strip() == DEFINITIONS_PROMPT:
        number, line = next_line()
    # read until the blank line that ends the definitions
    while line.strip():
        if line.strip().startswith(EXPRESSION_PROMPT):
            break
        parts = line.strip().split(' ', 1)
        if len(parts) != 2 or len(parts[0]) != 1 or parts[0] not in APPENDIX_ALPHABET:
            raise TranscriptError(number, f"Expected '<letter> <expression>', got {line.strip()!r}")
        name, body = parts[0], parts[1].strip()
        try:
            definitions[name] = Definition(name, parse_scalar(body), text=body)
        except ExpressionSyntaxError as error:
            raise TranscriptError(number, str(error))
        number, line = next_line()

    while not line.strip():
        number, line = next_line()
    text = _answer(line, EXPRESSION_PROMPT)
    if not text:
        raise TranscriptError(number, "Empty set expression")
    try:
        expression = parse_postfix(text, APPENDIX_ALPHABET)
    except SetLanguageError as error:
        raise TranscriptError(number, str(error))
    return SetProgram(tuple(definitions.values()), expression, global_a), text


def replay_appendix(stream):
    """
    Reproduce the script's output: one ``i [stack]`` line before each symbol
    of the expression, then the final inequality.
    """
    program, text = read_transcript(stream)
    table = program.table
    trace = []

    def render(item):
        if isinstance(item, VarRef):
            return item.name
        return desmos_body(compile_expression(item, table, program.global_a))

    def record(position, stack):
        trace.append(f'{position} {[render(item) for item in stack]!r}')

    try:
        parse_postfix(text, APPENDIX_ALPHABET, trace=record)
        result = emit_desmos(compile_program(program))
    except SetLanguageError as error:
        raise TranscriptError(0, str(error))
    logger.debug("Replayed transcript expression %r in %d steps", text, len(trace))
    return AppendixReplay(program, tuple(trace), result)
