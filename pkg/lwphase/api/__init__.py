from . import commands, schema, units

__all__ = ["commands", "schema", "units"]
