"""Minimal TOML-subset reader/writer for declarative config files.

Covers what the config schema uses: dotted/nested table headers, string,
integer, float and boolean scalars, flat arrays, and # comments.  The
environment ships neither tomllib (Python 3.10) nor a third-party TOML
package, so this small subset is implemented here; configs written by
:func:`dumps` always parse back to an equal mapping.
"""

from __future__ import annotations

import re
from typing import Any, Dict, List

_BARE_KEY = re.compile(r"^[A-Za-z0-9_-]+$")


class TomlError(ValueError):
    pass


def _parse_scalar(text: str, line_no: int):
    text = text.strip()
    if text.startswith('"'):
        if not text.endswith('"') or len(text) < 2:
            raise TomlError(f"line {line_no}: unterminated string")
        body = text[1:-1]
        return body.replace('\\"', '"').replace("\\\\", "\\")
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise TomlError(f"line {line_no}: cannot parse value {text!r}") from None


def _split_array(body: str, line_no: int) -> List[str]:
    items, depth, cur, in_str = [], 0, "", False
    for ch in body:
        if ch == '"':
            in_str = not in_str
        if ch == "," and depth == 0 and not in_str:
            items.append(cur)
            cur = ""
            continue
        if not in_str:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
        cur += ch
    if cur.strip():
        items.append(cur)
    if depth != 0 or in_str:
        raise TomlError(f"line {line_no}: malformed array")
    return items


def _strip_comment(line: str) -> str:
    out, in_str = "", False
    for ch in line:
        if ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out += ch
    return out


def loads(text: str) -> Dict[str, Any]:
    root: Dict[str, Any] = {}
    table = root
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise TomlError(f"line {line_no}: malformed table header")
            path = line[1:-1].strip()
            table = root
            for part in path.split("."):
                part = part.strip()
                if not _BARE_KEY.match(part):
                    raise TomlError(f"line {line_no}: bad table name {part!r}")
                table = table.setdefault(part, {})
                if not isinstance(table, dict):
                    raise TomlError(f"line {line_no}: {part!r} is not a table")
            continue
        if "=" not in line:
            raise TomlError(f"line {line_no}: expected key = value")
        key, _, value = line.partition("=")
        key = key.strip()
        if not _BARE_KEY.match(key):
            raise TomlError(f"line {line_no}: bad key {key!r}")
        value = value.strip()
        if value.startswith("["):
            if not value.endswith("]"):
                raise TomlError(f"line {line_no}: multi-line arrays unsupported")
            items = _split_array(value[1:-1], line_no)
            table[key] = [_parse_scalar(i, line_no) for i in items]
        else:
            table[key] = _parse_scalar(value, line_no)
    return root


def _format_scalar(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    raise TomlError(f"cannot serialize {type(value).__name__}")


def dumps(mapping: Dict[str, Any]) -> str:
    lines: List[str] = []

    def emit(table: Dict[str, Any], prefix: str) -> None:
        subtables = []
        for key, value in table.items():
            if isinstance(value, dict):
                subtables.append((key, value))
            elif isinstance(value, list):
                body = ", ".join(_format_scalar(v) for v in value)
                lines.append(f"{key} = [{body}]")
            else:
                lines.append(f"{key} = {_format_scalar(value)}")
        for key, value in subtables:
            name = f"{prefix}.{key}" if prefix else key
            lines.append("")
            lines.append(f"[{name}]")
            emit(value, name)

    emit(mapping, "")
    return "\n".join(lines).lstrip("\n") + "\n"
