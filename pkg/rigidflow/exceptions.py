# SPDX-License-Identifier: BSD-2-Clause

# Copyright (c) 2026 The RigidFlow developers


from sipbuild import UserException


class RigidFlowException(UserException):
    """ The base class of all errors that are the result of a user's input,
    either through the API or from the command line.
    """

    def __init__(self, text, *, detail=None):
        """ Initialise the exception. """

        super().__init__(text, detail=detail)

        # UserException doesn't pass anything to Exception.
        self.text = text
        self.detail = detail

    def __str__(self):
        """ Return the message including any detail. """

        if self.detail:
            return '{0}: {1}'.format(self.text, self.detail)

        return self.text


class ArgumentError(RigidFlowException, ValueError):
    """ An argument doesn't satisfy the precondition of an operation. """


class ConfigurationError(RigidFlowException, ValueError):
    """ A configuration value (from a file, a preset or an API call) is
    invalid or inconsistent.
    """


class ContractError(RigidFlowException, RuntimeError):
    """ The automatic differentiation engine was used incorrectly. """


class DimensionError(RigidFlowException, ValueError):
    """ Tensor shapes are incompatible. """


class IndexTableError(RigidFlowException, IndexError):
    """ A neighbor index table refers outside its reference. """


class NumericError(RigidFlowException, ArithmeticError):
    """ A value is not finite. """


class PreconditionError(RigidFlowException, ValueError):
    """ The inputs of a verification routine don't satisfy its hypothesis. """


class FormatError(RigidFlowException, ValueError):
    """ A file is truncated or malformed.  The byte offset at which the
    problem was found is available as the 'offset' attribute.
    """

    def __init__(self, text, *, offset, detail=None):
        """ Initialise the exception. """

        super().__init__('{0} at byte offset {1}'.format(text, offset),
                detail=detail)

        self.offset = offset


class TrainingError(RigidFlowException, RuntimeError):
    """ Training had to be abandoned.  The id of the offending batch is
    available as the 'batch_id' attribute.
    """

    def __init__(self, text, *, batch_id, detail=None):
        """ Initialise the exception. """

        super().__init__('{0} (batch {1})'.format(text, batch_id),
                detail=detail)

        self.batch_id = batch_id
