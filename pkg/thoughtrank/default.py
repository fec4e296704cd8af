"""Command-line entrypoint delegating to the ThoughtRank router.

Run as ``python thoughtrank/default.py <command> ...``; arguments are
forwarded to :func:`resources.lib.router.dispatch`.
"""

import os
import sys
import traceback

APP_DIR = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, APP_DIR)

# Dependencies bundled by build.sh
vendor_path = os.path.join(APP_DIR, "resources", "lib", "vendor")
if os.path.isdir(vendor_path) and vendor_path not in sys.path:
    sys.path.insert(0, vendor_path)

from resources.lib.perf import get_logger
from resources.lib.router import dispatch


def main(argv=None):
    try:
        return dispatch(sys.argv[1:] if argv is None else argv)
    except Exception:
        # Log the full traceback for debugging
        get_logger().error(f"ThoughtRank unhandled exception: {traceback.format_exc()}")
        sys.stderr.write("error[internal]: unexpected failure; rerun with --log-level DEBUG for details\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
