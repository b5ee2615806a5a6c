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
"""Covest Exceptions.

All exceptions raised by covest derive from the standard library exception,
which describes their kind, and additionally from :class:`CovestError`, such
that callers may catch the errors of the package as a whole. The command line
interface maps the exception classes to exit codes.

"""

__copyright__ = '2019 Frootlab'
__license__ = 'GPLv3'
__docformat__ = 'google'
__author__ = 'Frootlab Developers'
__email__ = 'contact@frootlab.org'
__authors__ = ['Patrick Michl <patrick.michl@frootlab.org>']

class CovestError(Exception):
    """Base class for exceptions in covest."""

    exit_code: int = 1

class DataFormatError(CovestError, ValueError):
    """Raise when an input file or a configuration value is malformed.

    Args:
        msg: Description of the malformation.
        path: Optional path of the offending file.
        line: Optional one-based line number within the file.

    """

    exit_code: int = 2

    def __init__(self, msg: str, path: object = None, line: int = 0) -> None:
        self.path = path
        self.line = line
        where = ''
        if path is not None:
            where = f"{path}:{line}: " if line else f"{path}: "
        super().__init__(where + msg)

class DomainError(CovestError, ValueError):
    """Raise when a point lies outside of the domain of a basis family."""

    exit_code: int = 2

class NumericalError(CovestError, ArithmeticError):
    """Raise when a numerical operation can not be completed reliably."""

    exit_code: int = 3

class AssertionFailure(CovestError):
    """Raise when a Monte-Carlo experiment does not meet its assertions."""

    exit_code: int = 4
