from django.core.cache import cache
from django.test import SimpleTestCase, override_settings

from reputation.cache_utils import (cache_with_tags, clear_all_cache, get_cache_key, get_or_compute,
                                    invalidate_by_tag, timed)

ISOLATED_CACHE = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'cache-utils-tests',
    }
}


@override_settings(CACHES=ISOLATED_CACHE)
class CacheUtilsTests(SimpleTestCase):

    def setUp(self):
        cache.clear()

    def test_cache_keys(self):
        self.assertEqual(get_cache_key('ppe_set', 'abc'), 'ppe_set_abc')
        self.assertEqual(get_cache_key('ppe_set'), 'ppe_set')

    def test_invalidate_by_tag(self):
        cache_with_tags('a', 1, ['params_x'])
        cache_with_tags('b', 2, ['params_x', 'params_y'])
        cache_with_tags('c', 3, ['params_y'])
        self.assertEqual(invalidate_by_tag('params_x'), 2)
        self.assertIsNone(cache.get('a'))
        self.assertIsNone(cache.get('b'))
        self.assertEqual(cache.get('c'), 3)
        self.assertEqual(invalidate_by_tag('params_x'), 0)

    def test_get_or_compute(self):
        calls = []

        def compute():
            calls.append(1)
            return {'points': 12}

        self.assertEqual(get_or_compute('k', compute, ['t']), ({'points': 12}, False))
        self.assertEqual(get_or_compute('k', compute, ['t']), ({'points': 12}, True))
        self.assertEqual(len(calls), 1)

    def test_clear_all_cache(self):
        cache_with_tags('a', 1, ['t'])
        clear_all_cache()
        self.assertIsNone(cache.get('a'))
        self.assertIsNone(cache.get('tag_t'))

    def test_timed_logs_and_passes_the_result_through(self):
        @timed('square')
        def square(x):
            return x * x

        with self.assertLogs('reputation.cache_utils', level='INFO') as logs:
            self.assertEqual(square(4), 16)
        self.assertIn('[TIMING] square', logs.output[0])
        self.assertEqual(square.__name__, 'square')
