""" django-fixpoints mechanizes diagonal constructions over SAT:
bounded machine runs compiled to CNF, classifiers forged against
their own verdicts, and syntactic fixed points over coded arithmetic.
"""

__version__ = '0.1.0'
