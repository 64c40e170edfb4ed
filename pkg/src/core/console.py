"""
Colored console helpers shared by the CLI, the validation scripts and the runner.
"""

from typing import Iterable, Sequence

from colorama import Fore, Style, init
from tabulate import tabulate

init(autoreset=True)


def header(title: str, color: str = Fore.CYAN, width: int = 60) -> None:
    print(f"\n{color}{'=' * width}")
    print(f"{color}{title}")
    print(f"{color}{'=' * width}")


def success(message: str) -> None:
    print(f"{Fore.GREEN}✅ {message}")


def failure(message: str) -> None:
    print(f"{Fore.RED}❌ {message}")


def warning(message: str) -> None:
    print(f"{Fore.YELLOW}⚠️ {message}")


def info(message: str) -> None:
    print(f"{Fore.BLUE}{message}{Style.RESET_ALL}")


def check(condition: bool, message: str) -> None:
    """Prints a ✅/❌ line and asserts, so scripts and pytest share one check."""
    if condition:
        success(message)
    else:
        failure(message)
    assert condition, message


def table(rows: Iterable[Sequence], headers: Sequence[str], tablefmt: str = "grid") -> str:
    return tabulate(list(rows), headers=list(headers), tablefmt=tablefmt)


def run_tests(title: str, tests: dict) -> dict:
    """
    Runs named test callables in order and prints the summary block.

    Returns:
        A mapping from test name to pass/fail.
    """
    print(f"{Fore.MAGENTA}{'=' * 60}")
    print(f"{Fore.MAGENTA}{title}")
    print(f"{Fore.MAGENTA}{'=' * 60}")

    results = {}
    for name, fn in tests.items():
        try:
            fn()
            results[name] = True
        except Exception as e:
            failure(f"{name} failed: {e}")
            results[name] = False

    header("Test Summary", Fore.MAGENTA)
    for test_name, passed in results.items():
        status = f"{Fore.GREEN}✅ PASSED" if passed else f"{Fore.RED}❌ FAILED"
        print(f"{test_name}: {status}")

    if all(results.values()):
        print(f"\n{Fore.GREEN}🎉 All tests passed successfully!")
    else:
        print(f"\n{Fore.YELLOW}⚠️ Some tests failed. Review the output above.")
    return results
