"""Static detection of gas-costly patterns in EVM bytecode."""

__version__ = "0.1.0"
