import os
import sys

from .debug import de_bug
from .errors import ConfigError


class config:
    def __init__(self):
        self.version = "1.0.0"
        self.backend = "exact"
        self.seed = 20171
        self.points = 20
        self.jet_order = 3
        # identity tolerances
        self.tol_identity = 1e-10
        self.tol_order2 = 1e-8
        self.tol_order3 = 1e-5
        self.tol_scale = 1e-6
        self.tol_killing = 1e-6
        # causality thresholds for float recovery
        self.causal_rel = 1e-9
        self.causal_abs = 1e-6
        self.log_level = "WARNING"
        self.log_file = ""
        self.output = ""
        self.upsilon = 0.0
        self.t = 0.0
        self.I = 0.0

    def reset(self):
        self.__init__()
        return self

    def as_dict(self):
        return {key: value for key, value in sorted(vars(self).items())}

    def _coerce(self, key, raw):
        current = getattr(self, key)
        try:
            if isinstance(current, bool):
                lowered = str(raw).strip().lower()
                if lowered in ("1", "true", "yes", "on"):
                    return True
                if lowered in ("0", "false", "no", "off"):
                    return False
                raise ValueError(raw)
            if isinstance(current, int):
                return int(raw)
            if isinstance(current, float):
                return float(raw)
        except (TypeError, ValueError):
            raise ConfigError("cannot read {!r} as {}".format(raw, type(current).__name__)) from None
        return str(raw)

    def update(self, **settings):
        for key, value in settings.items():
            if value is None:
                continue
            if not hasattr(self, key) or key.startswith("_"):
                raise ConfigError("unknown setting '{}'".format(key))
            setattr(self, key, self._coerce(key, value))
        if self.backend not in ("exact", "float"):
            raise ConfigError("backend must be 'exact' or 'float', got '{}'".format(self.backend))
        return self

    def load(self, path):
        """Read a plain-text ``key = value`` file; later keys win."""
        if not os.path.exists(path):
            raise ConfigError("config file not found: {}".format(path))
        settings = {}
        with open(path, "r") as handle:
            for number, line in enumerate(handle, start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError("{}:{}: expected 'key = value'".format(path, number))
                key, value = line.split("=", 1)
                settings[key.strip()] = value.strip()
        try:
            return self.update(**settings)
        except ConfigError as error:
            raise ConfigError("{}: {}".format(path, error)) from None


conf = config()
if conf.version == "":
    de_bug("version is not set, please set it in the config file.", "ERROR")
    sys.exit(2)
