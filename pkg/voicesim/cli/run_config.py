from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

from voicesim.errors import UsageError


@dataclass(frozen=True)
class RunConfig:
    """What one CLI invocation is about to do"""
    subcommand: str
    inputs: Dict[str, Optional[Path]] = field(default_factory=dict)
    out_dir: Optional[Path] = None
    fmt: Optional[str] = None
    verbose: bool = False

    def check_inputs(self) -> 'RunConfig':
        """Fail before any work starts when an input path is missing"""
        for name, path in self.inputs.items():
            if path is None:
                raise UsageError(f"{self.subcommand}: --{name} is required", argument=name)
            if not path.is_file():
                raise UsageError(f"{self.subcommand}: input file not found: {path}",
                                 argument=name, path=str(path))
        return self
