#!/usr/bin/env python3
"""Solve a 0/1 ILP given in MPS format and print `objective <value>`.

Reads the fixed-format MPS subset emitted by `mapfdl export` (OBJSENSE,
ROWS with N/L/E, COLUMNS with INTORG/INTEND markers, RHS, BV bounds) and
solves it with GLPK via cvxopt. Used as an independent cross-check of the
built-in solver.
"""
import sys


def parse_mps(path):
    sense = "MIN"
    obj_row = None
    rows = []  # (name, kind) for constraint rows
    cols = {}  # name -> [(row_name, coefficient)]
    col_order = []
    rhs = {}
    section = None
    expect_sense = False
    with open(path) as handle:
        for raw in handle:
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if not line[0].isspace():
                section = line.split()[0]
                expect_sense = section == "OBJSENSE"
                continue
            fields = line.split()
            if expect_sense:
                sense = fields[0]
                expect_sense = False
            elif section == "ROWS":
                kind, name = fields
                if kind == "N":
                    obj_row = name
                else:
                    rows.append((name, kind))
            elif section == "COLUMNS":
                if len(fields) >= 3 and fields[1] == "'MARKER'":
                    continue
                name = fields[0]
                if name not in cols:
                    cols[name] = []
                    col_order.append(name)
                for i in range(1, len(fields), 2):
                    cols[name].append((fields[i], float(fields[i + 1])))
            elif section == "RHS":
                for i in range(1, len(fields), 2):
                    rhs[fields[i]] = float(fields[i + 1])
            # BOUNDS: all variables are binary (BV); handled via glpk.ilp.
    return sense, obj_row, rows, cols, col_order, rhs


def main():
    if len(sys.argv) != 2:
        print("usage: solve_mps_glpk.py MODEL.mps", file=sys.stderr)
        return 2
    from cvxopt import matrix, spmatrix
    from cvxopt import glpk

    sense, obj_row, rows, cols, col_order, rhs = parse_mps(sys.argv[1])
    n = len(col_order)
    col_index = {name: j for j, name in enumerate(col_order)}
    row_kind = {name: kind for name, kind in rows}
    le_rows = [name for name, kind in rows if kind == "L"]
    eq_rows = [name for name, kind in rows if kind == "E"]
    le_index = {name: i for i, name in enumerate(le_rows)}
    eq_index = {name: i for i, name in enumerate(eq_rows)}

    c = [0.0] * n
    gv, gi, gj = [], [], []
    av, ai, aj = [], [], []
    for name, entries in cols.items():
        j = col_index[name]
        for row_name, value in entries:
            if row_name == obj_row:
                c[j] = -value if sense == "MAX" else value
            elif row_kind[row_name] == "L":
                gv.append(value)
                gi.append(le_index[row_name])
                gj.append(j)
            else:
                av.append(value)
                ai.append(eq_index[row_name])
                aj.append(j)

    # GLPK requires a nonempty inequality system; 0'x <= 1 is vacuous.
    if not le_rows:
        G = spmatrix([0.0], [0], [0], (1, n))
        h = matrix([1.0])
    else:
        G = spmatrix(gv, gi, gj, (len(le_rows), n))
        h = matrix([rhs.get(name, 0.0) for name in le_rows])
    A = spmatrix(av, ai, aj, (len(eq_rows), n)) if eq_rows else None
    b = matrix([rhs.get(name, 0.0) for name in eq_rows]) if eq_rows else None

    glpk.options["msg_lev"] = "GLP_MSG_OFF"
    status, x = glpk.ilp(matrix(c), G, h, A, b, I=set(), B=set(range(n)))
    if status != "optimal":
        print("status %s" % status, file=sys.stderr)
        return 3
    objective = sum(-c[j] * x[j] if sense == "MAX" else c[j] * x[j] for j in range(n))
    print("objective %d" % round(objective))
    return 0


if __name__ == "__main__":
    sys.exit(main())
