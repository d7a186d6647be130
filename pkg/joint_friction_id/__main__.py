import sys

from joint_friction_id.cli import main

if __name__ == "__main__":
    sys.exit(main())
