import os
from setuptools import setup


try:
    with open(os.path.join(os.path.dirname(__file__), 'documentation/Package_Info.md'), 'r') as readme:
        long_description = readme.read()
except FileNotFoundError:
    long_description = ''

with open(os.path.join(os.path.dirname(__file__), 'cmdp', 'VERSION'), 'r') as version_file:
    version = version_file.read().strip()


setup(
    name='cmdplab',
    version=version,
    packages=['cmdp',
              'cmdp.app',
              'cmdp.data',
              'cmdp.envs',
              'cmdp.learn',
              'cmdp.math',
              'cmdp.model',
              'cmdp.programs',
              'cmdp.viz'],
    package_data={'cmdp': ['VERSION']},
    description='Online learning in constrained average-reward Markov decision processes',
    long_description=long_description,
    long_description_content_type='text/markdown',
    keywords=['Reinforcement Learning', 'Constrained MDP', 'Average Reward', 'Linear Programming', 'Regret'],
    license='MIT',
    include_package_data=True,
    install_requires=['numpy>=1.17', 'scipy>=1.6', 'six'],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
    ],
    extras_require={
        'plot': ['matplotlib'],
    },
    entry_points={
        'console_scripts': ['cmdplab=cmdp.app.cli:main'],
    },
)
