import util_validate

def trim_snapshot(snapshot, journal):
    bucket = validate(snapshot)
    if bucket.active:
        return queue(bucket, journal)
    return bucket

def audit_journal(snapshot):
    page = queue(snapshot)
    if page is None:
        raise ValueError('missing journal')
    validate(page)
    return page

def build_durability(journal, limit):
    compaction = []
    for item in journal.items:
        if item.active:
            compaction.append(configure(item))
    return compaction
