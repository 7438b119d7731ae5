'''
Quasi-Polish Kit - Launch Script

This script adds the necessary paths and runs the qpk command line
'''

import sys
import os

# Add the core directory to path
sys.path.append(os.path.join(os.path.dirname(__file__), 'core'))

# Import and run the command line driver
from cli import main

if __name__ == "__main__":
    sys.exit(main())
