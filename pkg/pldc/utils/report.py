"""Plain-text and JSON report emission for the command line."""
import json


def _format_value(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return " ".join(_format_value(v) for v in value)
    return str(value)


def format_report(report):
    """`key: value` lines in insertion order; lists of dicts become indented rows."""
    lines = []
    for key, value in report.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{key}:")
            for row in value:
                lines.append("  " + "  ".join(f"{k}={_format_value(v)}" for k, v in row.items()))
        else:
            lines.append(f"{key}: {_format_value(value)}")
    return "\n".join(lines) + "\n"


def emit(args, report):
    """Print the report (text, or JSON with --json) and copy it to --report when given."""
    if getattr(args, "json", False):
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = format_report(report)
    print(text, end="")
    path = getattr(args, "report", None)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
