"""Can be used to access the version from the code"""

# Do not edit this file directly, use bumpversion
__version__ = '0.1.0'
