from django.core.management.base import BaseCommand, CommandError
from django.template.loader import render_to_string

from ...diagonal import all_tables, finite_fixed_point, self_describing_space


class Command(BaseCommand):
    help = ("Run the finite fixed-point search on a self-describing space "
            "against every classifier table and print the case analysis.")

    def add_arguments(self, parser):
        parser.add_argument(
            '--space', type=int, default=2,
            help="number of formulas in the space (default 2: p and ~p)")

    def handle(self, *args, **options):
        k = options['space']
        if k < 1:
            raise CommandError("--space must be at least 1", returncode=1)
        space = self_describing_space(k)
        reports = [finite_fixed_point(space, table) for table in all_tables(k)]
        index = reports[0].fixed_point_index
        rows = []
        for report in reports:
            rows.append({
                'verdicts': report.table.verdicts,
                'branches': report.case_analysis,
                'both_fail': all(b.fails for b in report.case_analysis),
                'actual': report.table[index] if index is not None else None,
                'misclassified': report.misclassified,
            })
        failing = sum(1 for report in reports if report.misclassified)
        context = {
            'formulas': [
                {'formula': f, 'claim': c, 'cnf': v}
                for f, c, v in zip(space.formulas, space.interpretation,
                                   reports[0].cnf_verdicts)],
            'index': index,
            'rows': rows,
            'failing': failing,
            'fixed_name': "F{0}".format(index),
            'fixed_claim': "~(S(F{0}) = SAT)".format(index),
        }
        self.stdout.write(render_to_string('fixpoints/demo_minimal.txt', context))
        if index is None or failing != len(reports):
            self.stdout.write("status: fail {0}/{1}".format(failing, len(reports)))
            raise CommandError("not every classifier table misclassifies the "
                               "fixed point", returncode=3)
        self.stdout.write("status: ok {0}/{1}".format(failing, len(reports)))
