"""Resolution of detected markers against parsed reference entries."""


def link_markers(markers: list, entries: list):
    """Match marker keys to entry keys by equality.

    Numeric keys compare as canonical decimal strings; author-year keys as
    normalized surname+year, so equality realizes the (surname, year)
    match. Returns (links, unresolved): `links` maps marker_id -> list of
    matched entry keys in marker key order, `unresolved` lists
    (marker_id, key) pairs that found no entry.
    """
    by_key = {e.entry_key for e in entries}
    links = {}
    unresolved = []
    for marker in markers:
        matched = [k for k in marker.keys if k in by_key]
        if matched:
            links[marker.marker_id] = matched
        for k in marker.keys:
            if k not in by_key:
                unresolved.append((marker.marker_id, k))
    return links, unresolved
