"""
PE homology constants.
"""

DEFAULT_LEVELS = 8
DEFAULT_HORIZON = 32  # legal-pair stabilisation depth
DEFAULT_LIMIT_HORIZON = 64  # stages searched for an isomorphism tail
DEFAULT_VERIFIED_DEPTH = 12

FIXTURES_ENV = "PEH_FIXTURES"

COEFFICIENT_MODES = ("Z", "Q")
OUTPUT_FORMATS = ("text", "json")

# Integers outside this range are written to JSON as decimal strings.
JSON_INT_MIN = -(2**63)
JSON_INT_MAX = 2**63 - 1

REPORT_SCHEMA_VERSION = 1
