import os

ROOT_DIR = os.path.dirname(os.path.abspath(__file__))
SRC_DIR = os.path.join(ROOT_DIR, 'src', 'dodiff')
SAMPLES_DIR = os.path.join(ROOT_DIR, 'samples')

# Source files that do not need a test_{name}.py of their own
TESTS_TO_EXCLUDE = ['exceptions.py', '__version__.py']
ITEMS_TO_EXCLUDE_IN_TEST = ['common']
