import sys
import platform
from time import perf_counter

from termcolor import colored

STATUS_COLORS = {
    "success": "green",
    "failure": "red",
    "status": "light_green",
    "warning": "yellow",
    "output": "cyan",
    "info": "cyan",
}

def get_color_map() -> dict:
    color_map = dict(STATUS_COLORS)
    if platform.system().lower() == "windows":
        color_map["info"] = "black"
    return color_map

def pretty_print(text: str, color: str = "info", no_newline: bool = False) -> None:
    """
    Print a console line for the cleansing CLI.
    Failures go to stderr, everything else to stdout.

    Args:
        text (str): The text to print
        color (str, optional): success, failure, status, warning, output or info.
            Unknown names fall back to info.
    """
    color_map = get_color_map()
    if color not in color_map:
        color = "info"
    stream = sys.stderr if color == "failure" else sys.stdout
    print(colored(text, color_map[color]), end='' if no_newline else "\n", file=stream)

def format_score(score: float) -> str:
    """Scores in reports and console lines use four decimals."""
    return f"{score:.4f}"

def timer_decorator(func):
    """
    Log how long a pipeline step took through the logger of the decorated module.
    Usage:
    @timer_decorator
    def run_pipeline(...):
    """
    def wrapper(*args, **kwargs):
        start_time = perf_counter()
        result = func(*args, **kwargs)
        elapsed = perf_counter() - start_time
        module_logger = sys.modules[func.__module__].__dict__.get("logger")
        if module_logger is not None:
            module_logger.info(f"{func.__name__} took {elapsed:.3f} seconds")
        return result
    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper
