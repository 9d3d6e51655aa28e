from math import floor, log, pow
import re


def human_readable_size(size_bytes: int) -> str:
    # https://stackoverflow.com/a/14822210
    if size_bytes == 0:
        return "0 B"
    size_name = ("B", "KB", "MB", "GB", "TB", "PB", "EB", "ZB", "YB")
    i = int(floor(log(size_bytes, 1024)))
    p = pow(1024, i)
    s = round(size_bytes / p, 2)
    return f'{s} {size_name[i]}'


def sanitize_feature_name(name: str) -> str:
    """
    Make a column or category name a single rule-grammar token
    """
    cleaned = re.sub(r'[\s()]+', '_', str(name).strip())
    return cleaned or '_'


def slugify(name: str) -> str:
    # For file names built from dataset and class names
    return re.sub(r'[^A-Za-z0-9_.-]+', '_', str(name)).strip('_') or 'unnamed'
