"""
Cache and timing helpers.

This module provides:
- a timing decorator that logs the wall time of expensive computations
- tagged cache entries, so every result computed for one parameter set can be
  invalidated together
- get-or-compute over the configured Django cache
"""
import functools
import logging
import time
from typing import Any, Callable, Optional, Set, TypeVar

from django.core.cache import cache

logger = logging.getLogger(__name__)

F = TypeVar('F', bound=Callable[..., Any])


def timed(label: str) -> Callable[[F], F]:
    """
    Decorator to log how long a call took.

    Usage:
        @timed("ppe_set")
        def compute_ppe_set(...):
            ...
    """
    def decorator(func: F) -> F:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            start_time = time.perf_counter()
            result = func(*args, **kwargs)
            elapsed = time.perf_counter() - start_time
            logger.info(f"[TIMING] {label}: {elapsed:.4f}s")
            return result
        return wrapper  # type: ignore[return-value]
    return decorator


def get_cache_key(prefix: str, identifier: Optional[str] = None) -> str:
    """Generate consistent cache keys."""
    if identifier is not None:
        return f"{prefix}_{identifier}"
    return prefix


def cache_with_tags(key: str, data: Any, tags: list[str], timeout: Optional[int] = 300) -> None:
    """
    Cache data with associated tags for easier invalidation.

    Args:
        key: The cache key
        data: The data to cache
        tags: List of tags to associate with this cache entry
        timeout: Cache timeout in seconds (None keeps the entry forever)
    """
    cache.set(key, data, timeout)

    for tag in tags:
        tag_key = f'tag_{tag}'
        tagged_keys: Set[str] = cache.get(tag_key, set())
        tagged_keys.add(key)
        cache.set(tag_key, tagged_keys, timeout)

    logger.debug(f"Cached {key} with tags: {tags}")


def invalidate_by_tag(tag: str) -> int:
    """
    Invalidate all cache entries associated with a tag.

    Returns:
        Number of cache entries invalidated
    """
    tag_key = f'tag_{tag}'
    tagged_keys: Set[str] = cache.get(tag_key, set())

    count = 0
    for key in tagged_keys:
        cache.delete(key)
        count += 1
        logger.debug(f"Invalidated cache key: {key}")

    cache.delete(tag_key)
    logger.info(f"Invalidated {count} cache entries for tag: {tag}")

    return count


def get_or_compute(key: str, compute: Callable[[], Any], tags: list[str],
                   timeout: Optional[int] = 300) -> tuple[Any, bool]:
    """Return (value, hit). On a miss the value is computed and cached under the tags."""
    cached = cache.get(key)
    if cached is not None:
        logger.info(f"Cache hit: {key}")
        return cached, True
    logger.info(f"Cache miss: {key}")
    value = compute()
    cache_with_tags(key, value, tags, timeout)
    return value, False


def clear_all_cache() -> None:
    """Clear all cache entries of the configured backend."""
    cache.clear()
    logger.info("Cleared all cache entries")
