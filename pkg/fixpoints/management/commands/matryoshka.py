from django.core.management.base import BaseCommand, CommandError
from django.template.loader import render_to_string

from ...exceptions import FixpointsError
from ...goedel import matryoshka_family


class Command(BaseCommand):
    help = "Build the nested family phi_n <-> ~Prov(code(phi_n) + n)."

    def add_arguments(self, parser):
        parser.add_argument('--n-max', type=int, default=50)

    def handle(self, *args, **options):
        try:
            family = matryoshka_family(options['n_max'])
        except FixpointsError as e:
            self.stdout.write("status: error")
            raise CommandError(str(e), returncode=1)
        distinct = len({certificate.psi_code for _, _, certificate in family})
        self.stdout.write(render_to_string('fixpoints/matryoshka.txt', {
            'family': family, 'distinct': distinct}))
        passed = all(certificate.passed for _, _, certificate in family)
        if not passed or distinct != len(family):
            self.stdout.write("status: fail")
            raise CommandError("family certificates do not hold", returncode=3)
        self.stdout.write("status: ok {0}".format(len(family)))
