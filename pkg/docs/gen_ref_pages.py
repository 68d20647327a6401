# SPDX-FileCopyrightText: Copyright the sp-einstein-fillings contributors
# SPDX-License-Identifier: Apache-2.0
"""Generate the code reference pages.

Private modules (leading underscore) and ``__main__`` are skipped; their
public names are documented through the package that re-exports them.
"""

import pathlib

import mkdocs_gen_files

PACKAGE = "sp_einstein_fillings"
ROOT = pathlib.Path("src")


def _identifier(module: pathlib.Path) -> tuple[str, ...] | None:
    parts = module.relative_to(ROOT).with_suffix("").parts
    if parts[-1] == "__init__":
        return parts[:-1]
    if parts[-1].startswith("_"):
        return None
    return parts


nav = mkdocs_gen_files.Nav()
for source in sorted((ROOT / PACKAGE).rglob("*.py")):
    parts = _identifier(source)
    if parts is None:
        continue
    if source.name == "__init__.py":
        page = pathlib.Path(*parts[1:], "index.md")
    else:
        page = pathlib.Path(*parts[1:]).with_suffix(".md")
    nav[parts] = page.as_posix()

    with mkdocs_gen_files.open(pathlib.Path("reference", page), "w") as fd:
        print(f"::: {'.'.join(parts)}", file=fd)
    mkdocs_gen_files.set_edit_path(pathlib.Path("reference", page), source)

with mkdocs_gen_files.open("reference/SUMMARY.md", "w") as nav_file:
    nav_file.writelines(nav.build_literate_nav())
