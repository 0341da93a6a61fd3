from django.apps import AppConfig


class SetlangConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'setlang'
    verbose_name = 'Set language'
