#!/usr/bin/env python3
# Copyright 2026 The ODMTS Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Prepends the Apache-2.0 header to source and build files that lack it."""

import pathlib
import sys

LINES = [
    "Copyright 2026 The ODMTS Authors",
    "",
    'Licensed under the Apache License, Version 2.0 (the "License");',
    "you may not use this file except in compliance with the License.",
    "You may obtain a copy of the License at",
    "",
    "    http://www.apache.org/licenses/LICENSE-2.0",
    "",
    "Unless required by applicable law or agreed to in writing, software",
    'distributed under the License is distributed on an "AS IS" BASIS,',
    "WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.",
    "See the License for the specific language governing permissions and",
    "limitations under the License.",
]

DIRS = ["src", "include", "tests", "tools", "bench"]


def header(prefix):
    return "\n".join((prefix + " " + l).rstrip() for l in LINES) + "\n\n"


def main(root):
    root = pathlib.Path(root)
    files = [root / "CMakeLists.txt"]
    for d in DIRS:
        files += sorted(p for p in (root / d).rglob("*") if p.is_file())
    for path in files:
        if path.suffix in (".h", ".cc"):
            prefix = "//"
        elif path.suffix == ".py" or path.name == "CMakeLists.txt":
            prefix = "#"
        else:
            continue
        text = path.read_text()
        if LINES[0] in "\n".join(text.splitlines()[:3]):
            continue
        shebang = ""
        if text.startswith("#!"):
            shebang, text = text.split("\n", 1)
            shebang += "\n"
        path.write_text(shebang + header(prefix) + text)
        print("added", path.relative_to(root))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent)
