from django.core.management.base import BaseCommand, CommandError
from django.template.loader import render_to_string

from ...diagonal import forge
from ...exceptions import BoundNotFound, FixpointsError
from ...harness import (
    ExternalSolver, resolve_classifier, store_artifact, write_certificate)


class Command(BaseCommand):
    help = ("Forge a formula the given classifier misclassifies and write "
            "its certificate.")

    def add_arguments(self, parser):
        parser.add_argument(
            'classifier',
            help="assembly file, or the name of a bundled classifier")
        parser.add_argument('--t-cap', type=int, default=1 << 16,
                            help="largest step bound to try")
        parser.add_argument('--out', help="certificate path (default: the "
                            "artifacts directory)")
        parser.add_argument('--solver-cmd', help="external solver command "
                            "with one {input} placeholder")
        parser.add_argument('--timeout', type=float, default=None,
                            help="external solver timeout in seconds")

    def fail(self, message, returncode):
        self.stdout.write("status: {0}".format(
            'bound-not-found' if returncode == 2 else 'error'))
        raise CommandError(message, returncode=returncode)

    def handle(self, *args, **options):
        try:
            name, program = resolve_classifier(options['classifier'])
        except (OSError, FixpointsError) as e:
            self.fail(str(e), 1)
        solver = None
        try:
            if options['solver_cmd']:
                solver = ExternalSolver.from_settings(
                    options['solver_cmd'], options['timeout'])
            certificate = forge(program, options['t_cap'], name, solver)
        except BoundNotFound as e:
            report = render_to_string('fixpoints/forge_report.txt', {
                'name': name, 't_cap': options['t_cap'],
                'transcript': e.transcript, 'certificate': None})
            self.stdout.write(report)
            path = store_artifact(report, '.transcript')
            self.stdout.write("transcript: {0}".format(path))
            self.fail(str(e), 2)
        except FixpointsError as e:
            self.fail(str(e), 1)

        text = write_certificate(certificate)
        path = options['out']
        if path:
            with open(path, 'w') as f:
                f.write(text)
        else:
            path = store_artifact(text, '.cert')
        self.stdout.write(render_to_string('fixpoints/forge_report.txt', {
            'name': name, 't_cap': options['t_cap'],
            'transcript': certificate.transcript, 'certificate': certificate}))
        self.stdout.write("status: ok certificate={0}".format(path))
