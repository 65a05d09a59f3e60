"""Text, JSON and CSV renderings of verification results."""

import csv
import io
import json


def format_value(v) -> str:
    """16 significant digits, always with a decimal point (``1`` -> ``1.0``)."""
    text = f"{float(v):.16g}"
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def result_text(result) -> str:
    if not result.is_query:
        return "true" if result.verdict else "false"
    if result.value is not None:
        return format_value(result.value)
    lo, hi = result.value_range
    return f"[{format_value(lo)}, {format_value(hi)}]"


def text_block(result) -> str:
    if result.is_query:
        head = f"Property: {result.property}"
    else:
        head = f"Number of states satisfying {result.property}: {result.count}"
    return f"{head}\nResult: {result_text(result)} ({result.context})"


def text_report(results) -> str:
    return "\n\n".join(text_block(r) for r in results) + "\n"


def result_dict(result) -> dict:
    probs = result.probabilities
    exact = result.exact_values
    values = []
    for i, s in enumerate(result.eval_states):
        entry = {"state": s, "value": repr(float(probs.values[s]))}
        if exact is not None:
            entry["exact"] = str(exact[i])
        values.append(entry)
    out = {
        "property": str(result.property),
        "kind": "query" if result.is_query else "bound",
        "evaluated_at": "filter states" if result.filtered else "initial state",
        "values": values,
        "result": result_text(result),
        "context": result.context,
        "engine": {
            "method": probs.method,
            "iterations": probs.iterations,
            "residual": probs.residual,
        },
    }
    if not result.is_query:
        out["verdict"] = result.verdict
        out["count"] = result.count
        out["satisfying_states"] = sorted(result.satisfying)
    elif result.value is None:
        lo, hi = result.value_range
        out["min"], out["max"] = repr(lo), repr(hi)
    return out


def json_report(results) -> str:
    return json.dumps([result_dict(r) for r in results], indent=2) + "\n"


def csv_report(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["property", "count", "result", "context"])
    for r in results:
        writer.writerow([str(r.property), "" if r.count is None else r.count,
                         result_text(r), r.context])
    return buf.getvalue()


def curve_csv(points) -> str:
    lines = ["step,probability"]
    lines.extend(f"{k},{p:.16g}" for k, p in points)
    return "\n".join(lines) + "\n"
