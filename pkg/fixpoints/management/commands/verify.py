from django.core.management.base import BaseCommand, CommandError

from ...diagonal import audit_certificate
from ...exceptions import CertificateFormatError
from ...harness import read_certificate


class Command(BaseCommand):
    help = "Re-check a misclassification certificate from scratch."

    def add_arguments(self, parser):
        parser.add_argument('certificate', help="certificate file")

    def handle(self, *args, **options):
        try:
            with open(options['certificate']) as f:
                certificate = read_certificate(f.read())
        except (OSError, UnicodeDecodeError, CertificateFormatError) as e:
            self.stdout.write("status: error")
            raise CommandError(str(e), returncode=1)
        failed = audit_certificate(certificate)
        for check in failed:
            self.stdout.write("failed check: {0}".format(check))
        if failed:
            self.stdout.write("status: fail {0}".format(",".join(failed)))
            raise CommandError("certificate fails: {0}".format(
                ", ".join(failed)), returncode=3)
        self.stdout.write("status: ok")
