from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar
import numpy as np
import json
import os

# Master seed used when no seed is configured
DEFAULT_SEED = 0xC12C

# Environment variable to override the number of worker threads of parallel sweeps
THREADS_ENV_VAR = 'CIRCUMRADIUSFEM_THREADS'

_T = TypeVar('_T')
_R = TypeVar('_R')


def load_json(file_name: str) -> list | dict:
    """Read a json file"""
    with open(file_name, 'r') as f:
        content = json.load(f)
    return content


def dump_json(content: list | dict, file_name: str):
    """Dump a json file"""
    dir_path = os.path.dirname(file_name)
    if dir_path and not os.path.exists(dir_path):
        os.makedirs(dir_path)
    with open(file_name, 'w') as f:
        json.dump(content, f, indent=4)


def format_value(value) -> str:
    """Render a csv cell, floats with 17 significant digits so that the text round-trips"""
    if value is None:
        return ''
    if isinstance(value, bool | np.bool_):
        return 'true' if value else 'false'
    if isinstance(value, float | np.floating):
        return format(float(value), '.17g')
    return str(value)


def spawn_generators(seed: int, count: int) -> list[np.random.Generator]:
    """Independent random generators derived from one master seed"""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def worker_count(default: int = 1) -> int:
    """Number of worker threads, overridden by the environment variable"""
    value = os.environ.get(THREADS_ENV_VAR)
    if value is None:
        return default
    try:
        count = int(value)
    except ValueError:
        raise ValueError(f"Environment variable '{THREADS_ENV_VAR}' must be an integer, got '{value}'")
    if count < 1:
        raise ValueError(f"Environment variable '{THREADS_ENV_VAR}' must be at least 1, got '{count}'")
    return count


def parallel_map(func: Callable[[_T], _R], items: Iterable[_T], max_workers: int | None = None) -> list[_R]:
    """Map func over items, results in input order regardless of the number of workers"""
    items = list(items)
    workers = worker_count() if max_workers is None else max_workers
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def parse_number_list(text: str, cast: Callable = float) -> list:
    """Parse a comma separated list such as '8,16,32'"""
    parts = [p.strip() for p in text.split(',') if p.strip()]
    if not parts:
        raise ValueError(f"Empty list '{text}'")
    return [cast(p) for p in parts]
