"""JSON and line-oriented text renderings of report documents.

Both renderings are produced from the same nested dict, so they carry the
same values; text rounds floats to 12 significant digits.
"""

import json
import math


def to_json(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, allow_nan=True)


def format_scalar(x) -> str:
    if x is None:
        return "null"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return f"{x:.12g}"
    return str(x)


def flatten(doc, prefix=""):
    """Yield ``(path, scalar)`` pairs in a stable order."""
    if isinstance(doc, dict):
        for key in sorted(doc):
            path = f"{prefix}.{key}" if prefix else str(key)
            yield from flatten(doc[key], path)
    elif isinstance(doc, (list, tuple)):
        if not doc:
            yield prefix, "[]"
        for i, item in enumerate(doc):
            yield from flatten(item, f"{prefix}[{i}]")
    else:
        yield prefix, doc


def to_text(doc, headline=()) -> str:
    lines = list(headline)
    for path, value in flatten(doc):
        lines.append(f"{path} = {format_scalar(value)}")
    return "\n".join(lines) + "\n"


def verdict_lines(report: dict):
    """Short human summary placed above the full listing."""
    out = [f"# model {report['model']} ({report['backend']}, n={report['n']})"]
    mo = report["matrix_oup"]
    out.append(f"# matrix inequality: {'holds' if mo['is_psd'] else 'VIOLATED'} "
               f"(min eigenvalue {format_scalar(mo['min_eigenvalue'])}, "
               f"determinant {format_scalar(mo['determinant'])})")
    for p in report["pairs"]:
        out.append(f"# pair ({p['i'] + 1},{p['j'] + 1}): epsilon {format_scalar(p['epsilon'])}, "
                   f"eta {format_scalar(p['eta'])}, ozawa {'holds' if p['ozawa']['holds'] else 'VIOLATED'}, "
                   f"heisenberg {'holds' if p['heisenberg']['holds'] else 'fails'}")
    for side, v in sorted(report.get("physicality", {}).items()):
        out.append(f"# {side} moments: {'physical' if v['is_psd'] else 'NOT PHYSICAL'} "
                   f"(min eigenvalue {format_scalar(v['min_eigenvalue'])})")
    return out


def table_text(columns, rows) -> str:
    """Tab-separated table with a header line."""
    lines = ["\t".join(columns)]
    for row in rows:
        lines.append("\t".join(format_scalar(row[c]) for c in columns))
    return "\n".join(lines) + "\n"
