from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, items, jobs=1):
    """Ordered map over ``items``; ``jobs > 1`` uses worker processes.

    Output order always follows input order, so results do not depend on the
    worker count.  ``fn`` must be picklable (module-level).
    """
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as ex:
        return list(ex.map(fn, items))
