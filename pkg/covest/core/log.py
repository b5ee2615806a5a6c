# -*- coding: utf-8 -*-
#
# Copyright (C) 2019 Frootlab
#
# This file is part of Frootlab Covest, https://www.frootlab.org/covest
#
#  Covest is free software: you can redistribute it and/or modify it under the
#  terms of the GNU General Public License as published by the Free Software
#  Foundation, either version 3 of the License, or (at your option) any later
#  version.
#
#  Covest is distributed in the hope that it will be useful, but WITHOUT ANY
#  WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
#  A PARTICULAR PURPOSE. See the GNU General Public License for more details.
#  You should have received a copy of the GNU General Public License along with
#  Covest. If not, see <http://www.gnu.org/licenses/>.
#
"""Process global logging.

The module keeps a single :class:`Logger` for the process, which writes events
with a timestamp and a severity to a daily rotated logfile.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import logging
import logging.handlers
import warnings
from pathlib import Path
from hup.base import attrib, env, abc
from hup.typing import Any, AnyOp, ClassVar, PathLike, StrOrInt, OptPath, Void

LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
DEFAULT_NAME = 'covest'
DEFAULT_FILE = Path(env.get_dir('user_log_dir'), DEFAULT_NAME + '.log')

def level_number(level: StrOrInt) -> int:
    """Get the numeric severity of a level name or number."""
    if isinstance(level, int):
        return level
    name = level.upper()
    if name not in LEVELS:
        raise ValueError(
            f"'{level}' is not a valid level, allowed are {', '.join(LEVELS)}")
    return 10 * (LEVELS.index(name) + 1)

#
# Logger Class
#

class Logger(attrib.Group, abc.Singleton):
    """Process global logger.

    Events are written to a logfile, which is rotated daily and keeps five
    backups. If the logfile can not be created, a temporary file is used.

    Args:
        name: Identifier of the underlying :class:`logging.Logger`.
        file: Path of the logfile. Default: 'covest.log' in the user log
            directory.
        level: Minimum severity of logged events as level name or number.
            Default: 'INFO'

    """

    _format: ClassVar[str] = "%(asctime)s %(levelname)s %(message)s"
    _datefmt: ClassVar[str] = "%Y-%m-%d %H:%M:%S"

    file: property = attrib.Virtual('_get_file', '_set_file')
    file.__doc__ = "Path of the current logfile."

    level: property = attrib.Virtual('_get_level', '_set_level')
    level.__doc__ = "Name of the minimum severity of logged events."

    _logger: property = attrib.Temporary(dtype=logging.Logger)

    def __init__(
            self, name: str = DEFAULT_NAME, file: PathLike = DEFAULT_FILE,
            level: StrOrInt = 'INFO') -> None:
        super().__init__()
        self._logger = logging.getLogger(name)
        self._logger.propagate = False
        self._set_level(level)
        self._set_file(file)

    def log(self, level: StrOrInt, msg: str, *args: Any, **kwds: Any) -> None:
        """Log event with given severity."""
        self._logger.log(level_number(level), msg, *args, **kwds)

    def exception(self, msg: str, *args: Any, **kwds: Any) -> None:
        """Log event with severity 'ERROR' and the traceback."""
        kwds.setdefault('exc_info', True)
        self._logger.log(logging.ERROR, msg, *args, **kwds)

    def close(self) -> None:
        """Close and remove the file handlers."""
        for handler in list(self._logger.handlers):
            handler.close()
            self._logger.removeHandler(handler)

    def _get_file(self) -> OptPath:
        for handler in self._logger.handlers:
            if isinstance(handler, logging.FileHandler):
                return Path(handler.baseFilename)
        return None

    def _set_file(self, file: PathLike) -> None:
        path = Path(env.expand(file))
        if not env.touch(path):
            path = Path(env.get_temp_file(suffix='log'))
            if not env.touch(path):
                warnings.warn("could not create a logfile")
                return
            warnings.warn(f"logfile '{file}' is not valid, using '{path}'")
        self.close()
        handler = logging.handlers.TimedRotatingFileHandler(
            str(path), when='d', interval=1, backupCount=5)
        handler.setFormatter(
            logging.Formatter(fmt=self._format, datefmt=self._datefmt))
        self._logger.addHandler(handler)

    def _get_level(self) -> str:
        return logging.getLevelName(self._logger.level)

    def _set_level(self, level: StrOrInt) -> None:
        self._logger.setLevel(level_number(level))

#
# Accessors to the process logger
#

def _forward(level: str) -> AnyOp:
    def wrapper(msg: str, *args: Any, **kwds: Any) -> None:
        if level == 'EXCEPTION':
            Logger().exception(msg, *args, **kwds)
        else:
            Logger().log(level, msg, *args, **kwds)
    wrapper.__doc__ = f"Log event with severity '{level}'."
    return wrapper

debug: Void = _forward('DEBUG')
info: Void = _forward('INFO')
warning: Void = _forward('WARNING')
error: Void = _forward('ERROR')
critical: Void = _forward('CRITICAL')
exception: Void = _forward('EXCEPTION')
