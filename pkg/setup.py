from setuptools import setup, find_packages
import pathlib

here = pathlib.Path(__file__).parent.resolve()

# Get the long description from the README file
long_description = (here / 'README.md').read_text(encoding='utf-8')

setup(
    name = 'fragcoag',
    version = '0.1.0',
    description = "Controlled fragmentation-coagulation games: Gillespie simulation of the finite-player merging/splitting chain, its Smoluchowski-type mean-field limit, exact dynamic programming for small populations, the norm-reduced optimal control problem and the bound ledger relating them.",
    long_description=long_description,
    long_description_content_type='text/markdown',
    classifiers = [
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Developers',
        'Topic :: Scientific/Engineering',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3 :: Only'
    ],
    keywords = ['coalition formation', 'coagulation', 'fragmentation', 'mean-field games', 'Smoluchowski', 'Gillespie', 'dynamic programming'],
    package_dir = {"":"src"},
    packages = find_packages(where = 'src'),
    python_requires='>=3.8',
    install_requires = [
        'numpy',
        'scipy',
        'pandas>=1.5'
    ],
    entry_points = {
        'console_scripts': ['fragcoag=fragcoag.cli:main'],
    },
)
