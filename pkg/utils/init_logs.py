"""
Initialize the log directory and default settings for qpk
"""

import os
import sys
import json
from datetime import datetime

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.append(os.path.join(ROOT, 'core'))

from log_setup import LOG_FILE
from settings import DEFAULTS, DEFAULTS_FILE


def initialize_logs(logs_dir=None):
    """Create the log file and the default settings file"""
    logs_dir = logs_dir or os.path.join(ROOT, DEFAULTS["log_dir"])
    os.makedirs(logs_dir, exist_ok=True)

    print("Initializing log files...")
    file_path = os.path.join(logs_dir, LOG_FILE)
    if not os.path.exists(file_path):
        with open(file_path, "w") as f:
            f.write(f"Log initialized at {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}\n")
        print(f"  Created: {LOG_FILE}")
    else:
        print(f"  Already exists: {LOG_FILE}")

    print("\nInitializing settings file...")
    if not os.path.exists(DEFAULTS_FILE):
        os.makedirs(os.path.dirname(DEFAULTS_FILE), exist_ok=True)
        with open(DEFAULTS_FILE, "w") as f:
            json.dump(DEFAULTS, f, indent=2)
        print(f"  Created: {os.path.basename(DEFAULTS_FILE)}")
    else:
        print(f"  Already exists: {os.path.basename(DEFAULTS_FILE)}")

    print(f"\nLog directory: {logs_dir}")


if __name__ == "__main__":
    initialize_logs()
