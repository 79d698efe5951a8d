import os
from setuptools import setup

README = open(os.path.join(os.path.dirname(__file__), 'README.rst')).read()

os.chdir(os.path.normpath(os.path.join(os.path.abspath(__file__), os.pardir)))

setup(
    name='django-fixpoints',
    version='0.1.0',
    packages=['fixpoints', 'fixpoints.templatetags', 'fixpoints.management',
              'fixpoints.management.commands', 'fixpoints.tests'],
    package_data={'fixpoints': ['templates/fixpoints/*.txt',
                                'classifiers/*.asm']},
    include_package_data=True,
    install_requires=['django >= 3.2', 'python-sat', 'numpy'],
    license='MIT License',
    description='A Django app that forges CNF formulas a given SAT classifier '
                'misclassifies, with checkable certificates, plus the '
                'arithmetic diagonal construction.',
    long_description=README,
    keywords="django sat cnf diagonalization fixed point goedel",
    classifiers=[
        'Environment :: Console',
        'Framework :: Django',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
