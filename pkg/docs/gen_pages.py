"""Build the API reference: one page per module, one landing page per package."""

import ast
from pathlib import Path

import mkdocs_gen_files

PACKAGE = "teamrules"
SKIP = {"presets"}

nav = mkdocs_gen_files.Nav()
root = Path(PACKAGE)


def summary(path: Path) -> str:
    doc = ast.get_docstring(ast.parse(path.read_text(encoding="utf-8")))
    return doc.splitlines()[0] if doc else ""


for package in sorted(p.parent for p in root.rglob("__init__.py")):
    parts = package.relative_to(root).parts
    if SKIP.intersection(parts):
        continue
    modules = sorted(m for m in package.glob("*.py") if m.stem != "__init__")
    ident = ".".join((PACKAGE, *parts))
    index = Path("reference", *parts, "index.md")
    nav[parts or (PACKAGE,)] = index.relative_to("reference").as_posix()

    with mkdocs_gen_files.open(index, "w") as f:
        f.write(f"# `{ident}`\n\n::: {ident}\n    options:\n      members: false\n\n")
        if modules:
            f.write("| module | summary |\n|---|---|\n")
            for module in modules:
                link = f"[`{module.stem}`]({module.stem}.md)"
                f.write(f"| {link} | {summary(module)} |\n")
    mkdocs_gen_files.set_edit_path(index, package / "__init__.py")

    for module in modules:
        page = Path("reference", *parts, f"{module.stem}.md")
        with mkdocs_gen_files.open(page, "w") as f:
            f.write(f"# `{ident}.{module.stem}`\n\n::: {ident}.{module.stem}\n")
        nav[(*parts, module.stem) if parts else (PACKAGE, module.stem)] = (
            page.relative_to("reference").as_posix()
        )
        mkdocs_gen_files.set_edit_path(page, module)

with mkdocs_gen_files.open("reference/SUMMARY.md", "w") as f:
    f.writelines(nav.build_literate_nav())
