# cli/__init__.py

# Command-line front end; the console script `qpbc` points at cli.main:main.
