from django.core.management.base import BaseCommand, CommandError

from ...cnf import Status, read_dimacs, solve_dpll, solve_exhaustive, solve_pysat
from ...exceptions import FixpointsError
from ...harness import ExternalSolver


class Command(BaseCommand):
    help = "Decide a DIMACS-CNF file and print the verdict with its model."

    def add_arguments(self, parser):
        parser.add_argument('dimacs', help="DIMACS-CNF file")
        parser.add_argument(
            '--oracle', default='dpll',
            choices=('dpll', 'exhaustive', 'pysat', 'external'))
        parser.add_argument('--solver-cmd', help="external solver command "
                            "with one {input} placeholder")
        parser.add_argument('--timeout', type=float, default=None)

    def handle(self, *args, **options):
        try:
            with open(options['dimacs']) as f:
                formula = read_dimacs(f.read())
            oracle = options['oracle']
            if oracle == 'external' or options['solver_cmd']:
                solve = ExternalSolver.from_settings(
                    options['solver_cmd'], options['timeout']).solve
            else:
                solve = {'dpll': solve_dpll, 'exhaustive': solve_exhaustive,
                         'pysat': solve_pysat}[oracle]
            verdict = solve(formula)
        except (OSError, UnicodeDecodeError, FixpointsError) as e:
            self.stdout.write("status: error")
            raise CommandError(str(e), returncode=1)
        if verdict.status is Status.SAT:
            self.stdout.write("s SATISFIABLE")
            self.stdout.write("v {0} 0".format(
                " ".join(str(lit) for lit in verdict.witness.literals())))
        else:
            self.stdout.write("s UNSATISFIABLE")
        self.stdout.write("status: {0}".format(verdict.status.value))
