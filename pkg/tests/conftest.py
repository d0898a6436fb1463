import os
import sys

# make the shared oracle helpers importable as plain modules
sys.path.insert(0, os.path.dirname(__file__))
