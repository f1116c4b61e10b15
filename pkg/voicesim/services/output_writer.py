import logging
import os
import tempfile
from pathlib import Path
from typing import Dict, List, Union

logger = logging.getLogger(__name__)


class AtomicOutputs:
    """
    Stage several output files and publish them together.

    Every file is first written under a hidden temporary name in the target
    directory; commit() renames them into place. Leaving the `with` block on
    an exception removes whatever was staged, so a failed run leaves no
    partial artefacts behind.
    """

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self._staged: Dict[Path, Path] = {}
        self.written: List[Path] = []

    def __enter__(self) -> 'AtomicOutputs':
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.commit()
        else:
            self.discard()
        return False

    def stage(self, name: str, data: Union[str, bytes]) -> Path:
        target = self.out_dir / name
        if isinstance(data, str):
            data = data.encode('utf-8')
        fd, tmp_name = tempfile.mkstemp(prefix=f".{name}.", suffix='.tmp', dir=self.out_dir)
        with os.fdopen(fd, 'wb') as handle:
            handle.write(data)
        self._staged[target] = Path(tmp_name)
        return target

    def commit(self):
        for target, tmp in self._staged.items():
            os.replace(tmp, target)
            self.written.append(target)
            logger.debug(f"Wrote {target}")
        self._staged.clear()

    def discard(self):
        for tmp in self._staged.values():
            try:
                tmp.unlink()
            except FileNotFoundError:
                pass
        if self._staged:
            logger.warning(f"Discarded {len(self._staged)} staged outputs in {self.out_dir}")
        self._staged.clear()
