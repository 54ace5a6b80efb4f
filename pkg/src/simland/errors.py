class SimlandError(Exception):
    exit_code = 1


class ConfigError(SimlandError, ValueError):
    exit_code = 1


class DataError(SimlandError, ValueError):
    exit_code = 2


class NumericError(SimlandError, ArithmeticError):
    exit_code = 3
