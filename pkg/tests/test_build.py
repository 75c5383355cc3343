from __future__ import annotations

import os

import pytest


pytest.importorskip("PyInstaller")

import build_exe  # noqa: E402


def test_build_options_target_the_cli_entry():
    opts = build_exe.build_options([])
    assert "--console" in opts
    assert opts[opts.index("--name") + 1] == "qtoda"
    assert "--onefile" not in opts
    assert opts[-1].endswith(os.path.join("qtoda", "main.py"))
    assert os.path.isfile(opts[-1])


def test_build_options_onefile():
    assert "--onefile" in build_exe.build_options(["--onefile"])
