import os

from django.core.management.base import BaseCommand, CommandError

from ...cnf import write_dimacs
from ...exceptions import FixpointsError
from ...harness import resolve_classifier, store_artifact
from ...tableau import encode, write_layout


def pin(text):
    address, _, value = text.partition(':')
    return int(address), int(value)


class Command(BaseCommand):
    help = ("Compile 'program accepts within t steps' to DIMACS-CNF plus "
            "a layout sidecar.")

    def add_arguments(self, parser):
        parser.add_argument('program', help="assembly file or bundled name")
        parser.add_argument('--t', type=int, required=True, help="step bound")
        parser.add_argument('--pin', type=pin, action='append', default=[],
                            help="address:byte, repeatable")
        parser.add_argument('--out', help="DIMACS path; the layout is "
                            "written next to it with a .layout suffix")

    def handle(self, *args, **options):
        try:
            _, program = resolve_classifier(options['program'])
            formula, layout = encode(program, options['pin'], options['t'])
        except (OSError, FixpointsError) as e:
            self.stdout.write("status: error")
            raise CommandError(str(e), returncode=1)
        dimacs = write_dimacs(formula)
        if options['out']:
            path = options['out']
            with open(path, 'w') as f:
                f.write(dimacs)
        else:
            path = store_artifact(dimacs, '.cnf')
        layout_path = os.path.splitext(path)[0] + '.layout'
        with open(layout_path, 'w') as f:
            f.write(write_layout(layout))
        self.stdout.write("formula: {0}".format(path))
        self.stdout.write("layout: {0}".format(layout_path))
        self.stdout.write("status: ok vars={0} clauses={1}".format(
            formula.num_vars, formula.num_clauses))
