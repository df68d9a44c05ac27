"""
Structural architecture tests.

Enforce layered architecture invariants via AST analysis; nothing is
imported or trained.

Layer order (lowest to highest):
  core / models / configs  →  services  →  main (CLI)

Inside services:
  tensor_engine, datapipe  →  model_service  →  objective
  datapipe  →  metrics
  everything  →  harness

Rules enforced:
  1. Services never import the CLI
  2. Models and configs stay at the base layer
  3. Service packages only import the packages below them
  4. No bare print() in src/ (use Loguru)
  5. Services read no environment variables; settings arrive via RunConfig
  6. The tensor engine is the only autodiff: no deep-learning frameworks

Known-debt tracking:
  Each test maintains a _KNOWN_* set of existing violations.
  - New violations outside the set → test FAILS (regression guard)
  - Known-debt entry no longer triggers → test FAILS (remove stale entry)
"""

import ast
from pathlib import Path

import pytest

# ── Paths ─────────────────────────────────────────────────────────────────────

BACKEND = Path(__file__).parent.parent.parent
SRC = BACKEND / "src"
SERVICES_DIR = SRC / "services"
MODELS_DIR = SRC / "models"
CONFIGS_DIR = SRC / "configs"

SERVICE_DEPENDENCIES: dict[str, set[str]] = {
    "tensor_engine": set(),
    "datapipe": set(),
    "model_service": {"tensor_engine", "datapipe"},
    "objective": {"tensor_engine", "datapipe", "model_service"},
    "metrics": {"datapipe"},
    "harness": {"tensor_engine", "datapipe", "model_service", "objective", "metrics"},
}

FRAMEWORKS = ("torch", "tensorflow", "jax", "keras", "autograd")


# ── Helpers ───────────────────────────────────────────────────────────────────


def parse_imports(file: Path) -> list[str]:
    """Return all imported module paths from a Python source file."""
    tree = ast.parse(file.read_text(encoding="utf-8"))
    result: list[str] = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            result.extend(alias.name for alias in node.names)
        elif isinstance(node, ast.ImportFrom) and node.module:
            result.append(node.module)
    return result


def find_print_calls(file: Path) -> list[int]:
    """Return line numbers of bare print() calls."""
    tree = ast.parse(file.read_text(encoding="utf-8"))
    return [
        node.lineno
        for node in ast.walk(tree)
        if isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "print"
    ]


def find_environment_reads(file: Path) -> list[int]:
    """Return line numbers of os.getenv / os.environ uses."""
    tree = ast.parse(file.read_text(encoding="utf-8"))
    return [
        node.lineno
        for node in ast.walk(tree)
        if isinstance(node, ast.Attribute)
        and isinstance(node.value, ast.Name)
        and node.value.id == "os"
        and node.attr in ("getenv", "environ")
    ]


def _debt_check(
    actual: set,
    known: set,
    label_new: str,
    label_stale: str,
) -> list[str]:
    """
    Return error strings if actual violations differ from known debt.
    Bidirectional: catches both regressions and stale debt entries.
    """
    errors: list[str] = []
    new = actual - known
    stale = known - actual
    if new:
        errors.append(f"{label_new}:\n" + "\n".join(f"  {v}" for v in sorted(new)))
    if stale:
        errors.append(
            f"{label_stale} (remove from _KNOWN_* set):\n"
            + "\n".join(f"  {v}" for v in sorted(stale))
        )
    return errors


# ── Test: Import Layering ─────────────────────────────────────────────────────


class TestImportLayering:
    """Lower layers never reach up."""

    _KNOWN_SERVICE_VIOLATIONS: set[str] = set()

    def test_services_never_import_cli(self):
        violations = [
            str(f.relative_to(SRC))
            for f in SERVICES_DIR.rglob("*.py")
            if "src.main" in parse_imports(f)
        ]
        assert not violations, f"Services importing the CLI: {violations}"

    def test_models_stay_at_base_layer(self):
        violations = [
            f"{f.relative_to(SRC)}: {imp}"
            for f in MODELS_DIR.rglob("*.py")
            for imp in parse_imports(f)
            if imp.startswith("src.services") or imp == "src.main"
        ]
        assert not violations, "Models importing services:\n" + "\n".join(violations)

    def test_configs_stay_at_base_layer(self):
        violations = [
            f"{f.relative_to(SRC)}: {imp}"
            for f in CONFIGS_DIR.rglob("*.py")
            for imp in parse_imports(f)
            if imp.startswith("src.services") or imp == "src.main"
        ]
        assert not violations, "Configs importing services:\n" + "\n".join(violations)

    @pytest.mark.parametrize("package", sorted(SERVICE_DEPENDENCIES))
    def test_service_packages_import_only_lower_layers(self, package):
        allowed = SERVICE_DEPENDENCIES[package] | {package}
        actual: set[str] = set()
        for py_file in (SERVICES_DIR / package).rglob("*.py"):
            for imp in parse_imports(py_file):
                if not imp.startswith("src.services."):
                    continue
                target = imp.split(".")[2]
                if target not in allowed:
                    actual.add(f"{py_file.relative_to(SRC)}: {imp}")

        errors = _debt_check(
            actual,
            self._KNOWN_SERVICE_VIOLATIONS,
            f"NEW upward imports from {package}",
            "Stale known-debt entries",
        )
        assert not errors, "\n\n".join(errors)

    def test_every_service_package_is_layered(self):
        packages = {p.name for p in SERVICES_DIR.iterdir() if (p / "__init__.py").exists()}
        assert packages == set(SERVICE_DEPENDENCIES)


# ── Test: Code Conventions ────────────────────────────────────────────────────


class TestCodeConventions:
    """Enforce conventions that static linters cannot check."""

    _KNOWN_PRINT_FILES: set[str] = set()

    _KNOWN_ENV_FILES: set[str] = set()

    def test_no_bare_print_in_src(self):
        """
        All logging must go through Loguru (src.core.logger).
        Bare print() bypasses the run_id context and log level filtering.
        """
        actual: set[str] = set()
        for py_file in SRC.rglob("*.py"):
            if find_print_calls(py_file):
                actual.add(str(py_file.relative_to(SRC)))

        errors = _debt_check(
            actual,
            self._KNOWN_PRINT_FILES,
            "NEW files using bare print() (use Loguru logger instead)",
            "Stale known-debt entries (print() removed, update list)",
        )
        assert not errors, "\n\n".join(errors)

    def test_services_take_settings_from_run_config(self):
        """
        Environment variables are read by the CLI and the logger only.
        Everything a run depends on must be in RunConfig so checkpoints
        reproduce it.
        """
        actual: set[str] = set()
        for py_file in SERVICES_DIR.rglob("*.py"):
            if find_environment_reads(py_file):
                actual.add(str(py_file.relative_to(SRC)))

        errors = _debt_check(
            actual,
            self._KNOWN_ENV_FILES,
            "NEW services reading the environment",
            "Stale known-debt entries",
        )
        assert not errors, "\n\n".join(errors)

    def test_no_deep_learning_frameworks(self):
        violations = [
            f"{f.relative_to(SRC)}: {imp}"
            for f in SRC.rglob("*.py")
            for imp in parse_imports(f)
            if imp.split(".")[0] in FRAMEWORKS
        ]
        assert not violations, "\n".join(violations)
