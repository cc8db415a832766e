"""In-memory file system with a current working directory.

State: ``tree`` is nested dictionaries (directories) whose leaves are
strings (file contents); ``cwd`` is the list of path components from the
root.
"""

from __future__ import annotations

import copy
import difflib
from functools import lru_cache

from ..schema import Boolean, Finite, NumericRange, Text, ToolSchema, Toolkit
from .base import DomainUpdateRule, Environment, ExecutionError, P, finite_or_empty

FORBIDDEN = "|/\\?"

_FILE_TOOLS = ("cat", "wc", "sort", "grep", "tail")


@lru_cache(maxsize=None)
def toolkit() -> Toolkit:
    item = Text()
    return Toolkit((
        ToolSchema("pwd", ()),
        ToolSchema("ls", (P("a", Boolean(), required=False, default=True),)),
        ToolSchema("cd", (P("folder", item, dep=True),)),
        ToolSchema("mkdir", (P("dir_name", Text()),)),
        ToolSchema("touch", (P("file_name", Text()),)),
        ToolSchema("echo", (P("content", Text()), P("file_name", Text(), required=False, default=True))),
        ToolSchema("cat", (P("file_name", item, dep=True),)),
        ToolSchema("find", (
            P("path", Text(), required=False, default=True),
            P("name", Text(), required=False, default=True),
        )),
        ToolSchema("wc", (
            P("file_name", item, dep=True),
            P("mode", Finite(("l", "w", "c")), required=False, default=True),
        )),
        ToolSchema("sort", (P("file_name", item, dep=True),)),
        ToolSchema("grep", (P("file_name", item, dep=True), P("pattern", Text()))),
        ToolSchema("du", (P("human_readable", Boolean(), required=False, default=True),)),
        ToolSchema("tail", (
            P("file_name", item, dep=True),
            P("lines", NumericRange(1, 100, True), required=False, default=True),
        )),
        ToolSchema("diff", (P("file_name1", item, dep=True), P("file_name2", item, dep=True))),
        ToolSchema("mv", (P("source", item, dep=True), P("destination", Text(), dep=True))),
        ToolSchema("rm", (P("file_name", item, dep=True),)),
        ToolSchema("rmdir", (P("dir_name", item, dep=True),)),
        ToolSchema("cp", (P("source", item, dep=True), P("destination", Text(), dep=True))),
    ))


def _size(node) -> int:
    if isinstance(node, str):
        return len(node.encode("utf-8"))
    return sum(_size(v) for v in node.values())


# Calls that succeed on the fixture state, one fresh environment each.
SAMPLES = (
    ("cd", {"folder": "projects"}),
    ("mkdir", {"dir_name": "reports"}),
    ("touch", {"file_name": "draft.txt"}),
    ("echo", {"content": "hello", "file_name": "greeting.txt"}),
    ("cat", {"file_name": "notes.txt"}),
    ("wc", {"file_name": "todo.txt", "mode": "w"}),
    ("sort", {"file_name": "data.csv"}),
    ("grep", {"file_name": "report.md", "pattern": "Revenue"}),
    ("tail", {"file_name": "notes.txt", "lines": 2}),
    ("diff", {"file_name1": "notes.txt", "file_name2": "todo.txt"}),
    ("mv", {"source": "todo.txt", "destination": "archive"}),
    ("cp", {"source": "report.md", "destination": "report_backup.md"}),
    ("rm", {"file_name": "data.csv"}),
    ("rmdir", {"dir_name": "archive"}),
    ("find", {"path": "projects", "name": "main"}),
    ("ls", {"a": True}),
)


class FileSystemEnv(Environment):
    sample_table = SAMPLES
    name = "filesystem"
    entity_params = frozenset(
        {(t, "file_name") for t in _FILE_TOOLS}
        | {("diff", "file_name1"), ("diff", "file_name2"), ("cd", "folder"), ("rm", "file_name"),
           ("rmdir", "dir_name"), ("mv", "source"), ("cp", "source")}
    )
    defaults = {
        "ls": {"a": False},
        "echo": {"file_name": None},
        "find": {"path": ".", "name": None},
        "wc": {"mode": "l"},
        "du": {"human_readable": False},
        "tail": {"lines": 10},
    }

    @classmethod
    def toolkit(cls) -> Toolkit:
        return toolkit()

    # -- state helpers --------------------------------------------------------

    def _dir(self) -> dict:
        node = self.state["tree"]
        for part in self.state["cwd"]:
            node = node[part]
        return node

    def files(self) -> list:
        return sorted(k for k, v in self._dir().items() if isinstance(v, str))

    def dirs(self) -> list:
        return sorted(k for k, v in self._dir().items() if isinstance(v, dict))

    def items(self) -> list:
        return sorted(self._dir())

    def build_rules(self) -> list:
        changes = "cd|mkdir|touch|echo|mv|cp|rm|rmdir"
        files = tuple((t, "file_name") for t in _FILE_TOOLS) + (("diff", "file_name1"), ("diff", "file_name2"))
        return [
            DomainUpdateRule(changes, files, lambda s: finite_or_empty(self.files()), "file list -> operable files"),
            DomainUpdateRule(
                changes,
                (("mv", "source"), ("cp", "source"), ("rm", "file_name")),
                lambda s: finite_or_empty(self.items()),
                "current contents -> available items",
            ),
            DomainUpdateRule(
                changes,
                (("cd", "folder"),),
                lambda s: finite_or_empty(self.dirs() + ["..", "/"]),
                "directory list -> navigable paths",
            ),
            DomainUpdateRule(changes, (("rmdir", "dir_name"),), lambda s: finite_or_empty(self.dirs()),
                             "directory list -> removable directories"),
            DomainUpdateRule(changes, (("mv", "destination"), ("cp", "destination")), lambda s: Text(),
                             "available items plus new names"),
        ]

    # -- checks -----------------------------------------------------------------

    @staticmethod
    def _check_name(param: str, name: str) -> None:
        if not name or name in (".", ".."):
            raise ExecutionError("path", f"invalid name {name!r}", param)
        bad = [c for c in FORBIDDEN if c in name]
        if bad:
            raise ExecutionError("path", f"{name!r} contains forbidden characters {bad}", param)

    @staticmethod
    def _check_relative(param: str, path: str) -> None:
        if path.startswith("/") or "../" in path or path.startswith(".."):
            raise ExecutionError("path", f"{path!r} escapes the working directory", param)

    def precheck(self, tool: str, args: dict) -> None:
        if tool in ("mkdir", "rmdir"):
            self._check_name("dir_name", args.get("dir_name", ""))
        elif tool == "touch" or (tool in _FILE_TOOLS + ("rm",) and "file_name" in args):
            self._check_name("file_name", args.get("file_name", ""))
        elif tool == "echo" and args.get("file_name") is not None:
            self._check_name("file_name", args["file_name"])
        elif tool == "diff":
            self._check_name("file_name1", args.get("file_name1", ""))
            self._check_name("file_name2", args.get("file_name2", ""))
        elif tool == "cd":
            folder = args.get("folder", "")
            if folder not in ("..", "/"):
                self._check_relative("folder", folder)
                self._check_name("folder", folder)
        elif tool in ("mv", "cp"):
            for p in ("source", "destination"):
                self._check_relative(p, args.get(p, ""))
                self._check_name(p, args.get(p, ""))
        elif tool == "find" and args.get("path") not in (None, "."):
            self._check_relative("path", args["path"])

    def _read(self, param: str, name: str) -> str:
        node = self._dir().get(name)
        if not isinstance(node, str):
            raise ExecutionError("missing-entity", f"no file named {name!r}", param)
        return node

    # -- tools ------------------------------------------------------------------

    def do_pwd(self):
        return "/" + "/".join(self.state["cwd"])

    def do_ls(self, a=False):
        return [n for n in self.items() if a or not n.startswith(".")]

    def do_cd(self, folder):
        if folder == "/":
            self.state["cwd"] = []
        elif folder == "..":
            self.state["cwd"] = self.state["cwd"][:-1]
        else:
            self.state["cwd"] = self.state["cwd"] + [folder]
        return self.do_pwd()

    def do_mkdir(self, dir_name):
        here = self._dir()
        if dir_name in here:
            raise ExecutionError("duplicate", f"{dir_name!r} already exists", "dir_name")
        here[dir_name] = {}

    def do_touch(self, file_name):
        here = self._dir()
        if file_name in here:
            raise ExecutionError("duplicate", f"{file_name!r} already exists", "file_name")
        here[file_name] = ""

    def do_echo(self, content, file_name=None):
        if file_name is None:
            return content
        here = self._dir()
        if isinstance(here.get(file_name), dict):
            raise ExecutionError("duplicate", f"{file_name!r} is a directory", "file_name")
        here[file_name] = content
        return None

    def do_cat(self, file_name):
        return self._read("file_name", file_name)

    def do_find(self, path=".", name=None):
        node = self._dir()
        prefix = "."
        if path not in (None, "."):
            for part in path.strip("/").split("/"):
                if not isinstance(node.get(part), dict):
                    raise ExecutionError("missing-entity", f"no directory {path!r}", "path")
                node = node[part]
            prefix = "./" + path.strip("/")
        found = []

        def walk(n, base):
            for key in sorted(n):
                full = f"{base}/{key}"
                if name is None or name in key:
                    found.append(full)
                if isinstance(n[key], dict):
                    walk(n[key], full)

        walk(node, prefix)
        return found

    def do_wc(self, file_name, mode="l"):
        text = self._read("file_name", file_name)
        if mode == "l":
            return len(text.splitlines())
        if mode == "w":
            return len(text.split())
        return len(text)

    def do_sort(self, file_name):
        return "\n".join(sorted(self._read("file_name", file_name).splitlines()))

    def do_grep(self, file_name, pattern):
        return [line for line in self._read("file_name", file_name).splitlines() if pattern in line]

    def do_du(self, human_readable=False):
        size = _size(self._dir())
        return f"{size / 1024:.2f} KB" if human_readable else size

    def do_tail(self, file_name, lines=10):
        return "\n".join(self._read("file_name", file_name).splitlines()[-int(lines):])

    def do_diff(self, file_name1, file_name2):
        a = self._read("file_name1", file_name1).splitlines()
        b = self._read("file_name2", file_name2).splitlines()
        return "\n".join(difflib.unified_diff(a, b, file_name1, file_name2, lineterm=""))

    def _transfer(self, source, destination, keep: bool):
        here = self._dir()
        if source not in here:
            raise ExecutionError("missing-entity", f"no item named {source!r}", "source")
        node = here[source]
        target = here.get(destination)
        if isinstance(target, dict):
            if source in target:
                raise ExecutionError("duplicate", f"{destination}/{source} already exists", "destination")
            target[source] = copy.deepcopy(node)
        elif target is not None or destination == source:
            raise ExecutionError("duplicate", f"{destination!r} already exists", "destination")
        else:
            here[destination] = copy.deepcopy(node)
        if not keep:
            del here[source]

    def do_mv(self, source, destination):
        self._transfer(source, destination, keep=False)

    def do_cp(self, source, destination):
        self._transfer(source, destination, keep=True)

    def do_rm(self, file_name):
        here = self._dir()
        if file_name not in here:
            raise ExecutionError("missing-entity", f"no item named {file_name!r}", "file_name")
        del here[file_name]

    def do_rmdir(self, dir_name):
        here = self._dir()
        if not isinstance(here.get(dir_name), dict):
            raise ExecutionError("missing-entity", f"no directory named {dir_name!r}", "dir_name")
        del here[dir_name]
