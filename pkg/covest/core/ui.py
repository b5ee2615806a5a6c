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
"""User notifications."""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

import functools
import sys
from hup.typing import Any, AnyOp, ErrMeta, ErrType, ErrStack
from covest.core import log

LEVELS = log.LEVELS

# Output stream and prefix of printed notifications
_OUTPUT = {
    'DEBUG': ('stderr', ''),
    'INFO': ('stdout', ''),
    'WARNING': ('stderr', 'warning: '),
    'ERROR': ('stderr', 'error: '),
    'CRITICAL': ('stderr', 'critical: ')}

_level = 'INFO'

#
# Notifications
#

def get_notification_level() -> str:
    """Get minimum notification type, which is shown to the user."""
    return _level

def set_notification_level(level: str) -> None:
    """Set minimum notification type, which is shown to the user.

    Notifications below the level are still written to the logfile.

    """
    global _level
    level = level.upper()
    if level not in LEVELS:
        raise ValueError(f"notification level '{level}' is not valid")
    _level = level

def is_above_level(ntype: str) -> bool:
    """Check if a notification type is shown at the current level."""
    ntype = ntype.upper()
    if ntype not in LEVELS:
        return False
    return LEVELS.index(ntype) >= LEVELS.index(_level)

def notify(ntype: str, msg: str) -> None:
    """Log message and print it, if the type is shown at the current level."""
    ntype = ntype.upper()
    if ntype not in LEVELS:
        raise ValueError(f"notification type '{ntype}' is not valid")
    if msg:
        log.Logger().log(ntype, msg)
    if is_above_level(ntype):
        stream, prefix = _OUTPUT[ntype]
        print(prefix + msg, file=getattr(sys, stream))

def debug(msg: str) -> None:
    """Provide runtime information, like rank decisions."""
    notify('DEBUG', msg)

def info(msg: str) -> None:
    """Inform the user about a regular condition."""
    notify('INFO', msg)

def warning(msg: str) -> None:
    """Warn the user about a numerical repair or a degenerate input."""
    notify('WARNING', msg)

def error(msg: str) -> None:
    notify('ERROR', msg)

def critical(msg: str) -> None:
    notify('CRITICAL', msg)

#
# Exception Handling
#

def hook_exception(cls: ErrMeta, obj: ErrType, tb: ErrStack) -> None:
    """Log uncaught exception with traceback."""
    log.exception(str(obj), exc_info=(cls, obj, tb))

def bypass_exceptions(
        func: AnyOp, hook: AnyOp, interrupt: bool = False) -> AnyOp:
    """Pass exceptions to a hook before calling the given function."""
    @functools.wraps(func)
    def wrapper(cls: ErrMeta, obj: ErrType, tb: ErrStack) -> Any:
        if issubclass(cls, Exception):
            hook(cls, obj, tb)
            if interrupt:
                return None
        return func(cls, obj, tb)
    return wrapper

def bypass_excepthook() -> None:
    """Log exceptions, which reach :data:`sys.excepthook`."""
    if not getattr(sys.excepthook, '__wrapped__', None):
        sys.excepthook = bypass_exceptions(sys.excepthook, hook_exception)
