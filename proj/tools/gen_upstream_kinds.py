#!/usr/bin/env python3
"""Regenerates src/upstream_kinds.inc from pympistandard's kind definitions.

Usage: PYTHONPATH=<dir containing pympistandard> tools/gen_upstream_kinds.py > src/upstream_kinds.inc
"""

import re
import sys

import pympistandard._kinds as kinds
from pympistandard.kind import Kind

# Upstream kinds that map onto a kind of the closed set other than
# OTHER_INT / OTHER_OPAQUE.
CLOSED = {
    "BUFFER": "BUFFER", "C_BUFFER": "BUFFER", "C_BUFFER2": "BUFFER",
    "C_BUFFER3": "BUFFER", "C_BUFFER4": "BUFFER",
    "POLYXFER_NUM_ELEM": "COUNT", "POLYXFER_NUM_ELEM_NNI": "COUNT",
    "XFER_NUM_ELEM": "COUNT", "XFER_NUM_ELEM_NNI": "COUNT",
    "XFER_NUM_ELEM_SMALL": "COUNT", "XFER_NUM_ELEM_NNI_SMALL": "COUNT",
    "POLYDTYPE_NUM_ELEM": "COUNT", "POLYDTYPE_NUM_ELEM_NNI": "COUNT",
    "POLYDTYPE_NUM_ELEM_PI": "COUNT",
    "DATATYPE": "DATATYPE", "COMMUNICATOR": "COMM", "GROUP": "GROUP",
    "WINDOW": "WIN", "FILE": "FILE", "REQUEST": "REQUEST", "OPERATION": "OP",
    "INFO": "INFO", "STATUS": "STATUS", "RANK": "RANK", "RANK_NNI": "RANK",
    "TAG": "TAG", "INDEX": "INDEX", "LOGICAL": "LOGICAL_FLAG",
    "LOGICAL_OPTIONAL": "LOGICAL_FLAG", "LOGICAL_BOOLEAN": "LOGICAL_FLAG",
    "STRING": "STRING", "STRING_ARRAY": "STRING",
    "ERROR_CODE": "ERROR_CODE", "ERROR_CODE_SHOW_INTENT": "ERROR_CODE",
    "FUNCTION": "CALLBACK", "FUNCTION_SMALL": "CALLBACK", "POLYFUNCTION": "CALLBACK",
    "EVENT_CB_FUNCTION": "CALLBACK", "EVENT_DROP_CB_FUNCTION": "CALLBACK",
    "EVENT_FREE_CB_FUNCTION": "CALLBACK",
}

INTEGER_C = {"int", "MPI_Aint", "MPI_Count", "MPI_Offset", "MPI_Fint"}


def fortran(text):
    """Lower-cases Fortran keywords, keeping MPI_* names."""
    if not text:
        return ""
    return re.sub(r"[A-Za-z_][A-Za-z0-9_]*",
                  lambda m: m.group(0) if m.group(0).startswith("MPI_") else m.group(0).lower(),
                  text)


def main():
    rows = []
    for name, kind in vars(kinds).items():
        if not isinstance(kind, Kind):
            continue
        c_small = getattr(kind, "_iso_c_small", None) or ""
        c_large = getattr(kind, "_iso_c_large", None) or ""
        f_small = getattr(kind, "_f08_small", None) or ""
        f_large = getattr(kind, "_f08_large", None) or ""
        if c_small == "\\ldots":
            c_small = "..."
        closed = CLOSED.get(name) or ("OTHER_INT" if c_small in INTEGER_C else "OTHER_OPAQUE")
        if f_small.startswith(("TYPE(*)", "TYPE(C_PTR)", "PROCEDURE", "CHARACTER")):
            f_small = f_large = ""
        rows.append((name, closed, c_small, c_large, fortran(f_small), fortran(f_large)))

    out = sys.stdout
    out.write("// Generated by tools/gen_upstream_kinds.py. Do not edit.\n")
    out.write("// upstream kind, kind, C type, large C type, f08 type, large f08 type\n")
    for row in rows:
        out.write("    {" + ", ".join('"%s"' % v for v in row) + "},\n")


if __name__ == "__main__":
    main()
