import logging
import os

from joint_friction_id import constant
from joint_friction_id.util import id_gen


def create(seed, root=None):
    root = root or os.environ.get(
        constant.RUNS_ROOT_ENV_NAME,
        constant.DEFAULT_RUNS_ROOT,
    )
    return RunDir(os.path.join(root, id_gen.gen_run_id(seed)))


class RunDir:
    """A directory holding every artifact of one experiment run."""

    def __init__(self, root_path):
        self.root_path = os.path.abspath(root_path)
        os.makedirs(self.root_path, exist_ok=True)
        logging.info("use run dir: %s", self.root_path)

    def get_root_path(self):
        return self.root_path

    def subpath(self, path):
        res = os.path.join(self.get_root_path(), path)
        res_dir = os.path.dirname(res)
        os.makedirs(res_dir, exist_ok=True)
        return res

    def exists(self, path):
        return os.path.exists(os.path.join(self.get_root_path(), path))

    def list(self, sub_dir, suffix=""):
        target = os.path.join(self.get_root_path(), sub_dir)
        if not os.path.isdir(target):
            return []
        return [
            os.path.join(target, name)
            for name in sorted(os.listdir(target))
            if name.endswith(suffix)
        ]
