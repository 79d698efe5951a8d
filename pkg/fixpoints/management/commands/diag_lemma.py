from django.core.management.base import BaseCommand, CommandError
from django.template.loader import render_to_string

from ...exceptions import FixpointsError
from ...goedel import (
    diagonalize, free_variables, numeral, parse_formula, size, substitute)


class Command(BaseCommand):
    help = ("Build the diagonal sentence of a formula with one free "
            "variable and check its fixed-point certificate.")

    def add_arguments(self, parser):
        parser.add_argument('theta', nargs='?', default='~Prov(x)',
                            help="formula text (default: ~Prov(x))")
        parser.add_argument('--out', help="write the certificate here")

    def handle(self, *args, **options):
        try:
            theta = parse_formula(options['theta'])
            psi, certificate = diagonalize(theta)
        except FixpointsError as e:
            self.stdout.write("status: error")
            raise CommandError(str(e), returncode=1)
        name = free_variables(theta).pop()
        text = render_to_string('fixpoints/diag_certificate.txt', {
            'certificate': certificate,
            'psi_size': size(psi),
            'instance': substitute(theta, name, numeral(certificate.psi_code)),
        })
        if options['out']:
            with open(options['out'], 'w') as f:
                f.write(text + "\n")
        self.stdout.write(text)
        if not certificate.passed:
            self.stdout.write("status: fail")
            raise CommandError("D(b) does not denote code(psi)", returncode=3)
        self.stdout.write("status: ok")
