# Imports
from setuptools import setup, find_packages

# Loading README file
with open("README.md", "r") as f:
    long_description = f.read()
with open("requirements.txt", "r") as f:
    requirements = f.read()


setup(
    name='segsignal',
    version='1.0.0',
    license='GPL-3.0',
    description='Detection and estimation of one or two change-points in noisy segment signals',
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    author='João Victor da Fonseca Pinto',
    author_email='jodafons@lps.ufrj.br',
    keywords=["change-point", "scan statistic", "minimax", "monte carlo"],
    install_requires=requirements,
    extras_require={
        'test': ['pytest', 'hypothesis'],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
    ],
    entry_points = {
        'console_scripts' : [
            'segsig = segsignal.main:run',
        ]
    }
)
