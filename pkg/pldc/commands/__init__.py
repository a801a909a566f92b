from . import convert, discrepancy, evaluate, fit, predict, synth

# Registered in this order by pldc.cli.create_parser
COMMANDS = [fit, predict, discrepancy, synth, evaluate, convert]

__all__ = ["COMMANDS"]
