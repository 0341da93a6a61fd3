from django.apps import AppConfig


class RasterConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'raster'
