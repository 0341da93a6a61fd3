import hashlib
import io
import logging

import numpy as np
from django.template.loader import render_to_string
from PIL import Image

from .exceptions import ExportError

logger = logging.getLogger(__name__)

SVG_TEMPLATE = 'raster/contours.svg'


def _pixels(bitmap):
    # image rows run top-down, bitmap rows bottom-up
    return np.where(bitmap.bits[::-1], 255, 0).astype(np.uint8)


def pgm_bytes(bitmap):
    """Binary P5 encoding of ``bitmap``: 255 inside, 0 outside."""
    buffer = io.BytesIO()
    Image.fromarray(_pixels(bitmap)).save(buffer, format='PPM')
    return buffer.getvalue()


def write_pgm(bitmap, path):
    try:
        Image.fromarray(_pixels(bitmap)).save(path, format='PPM')
    except OSError as error:
        raise ExportError(path, error) from error
    logger.info("Wrote %dx%d PGM to %s", bitmap.grid.nx, bitmap.grid.ny, path)


def bitmap_checksum(bitmap):
    """SHA-256 over the image size and pixel payload."""
    digest = hashlib.sha256(f'{bitmap.grid.nx}x{bitmap.grid.ny}:'.encode('ascii'))
    digest.update(_pixels(bitmap).tobytes())
    return digest.hexdigest()


def _path_data(polyline):
    commands = [
        f'{"M" if index == 0 else "L"}{point.x:.6f} {-point.y:.6f}'
        for index, point in enumerate(polyline.points)
    ]
    if polyline.closed:
        commands.append('Z')
    return ' '.join(commands)


def render_svg(contours, size=512, stroke='black'):
    """SVG 1.1 document with one path per polyline, y pointing up."""
    grid = contours.grid
    width = grid.x_max - grid.x_min
    height = grid.y_max - grid.y_min
    scale = size / max(width, height)
    return render_to_string(SVG_TEMPLATE, {
        'view_box': f'{grid.x_min:g} {-grid.y_max:g} {width:g} {height:g}',
        'width': round(width * scale),
        'height': round(height * scale),
        'stroke': stroke,
        'stroke_width': f'{1.5 / scale:.6g}',
        'paths': [_path_data(polyline) for polyline in contours.polylines],
    })


def write_svg(contours, path, size=512):
    document = render_svg(contours, size)
    try:
        with open(path, 'w', encoding='utf-8') as stream:
            stream.write(document)
    except OSError as error:
        raise ExportError(path, error) from error
    logger.info("Wrote %d contour paths to %s", len(contours), path)
