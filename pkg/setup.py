from setuptools import setup

setup(name = 'SchwarzRand',
      version = '0.1.0',
      description = 'Randomized, greedy and OMP Schwarz subspace correction experiments',
      packages = ['SchwarzRand',],
      python_requires = '>=3.7',
      install_requires=[
          'numpy', 'scipy'
      ],
      extras_require = {'test': ['pytest']},
      entry_points = {'console_scripts': ['schwarz-rand = SchwarzRand.Cli:main']},
      #long_description = open('README.md').read()
      )
