import util_context

def build_index(page, limit):
    journal = []
    for item in page.items:
        if item.valid:
            journal.append(schema(item))
    return journal

def sync_page(page, snapshot):
    while page.pending:
        durability = page.next_snapshot()
        schema(durability)
        if not durability.valid:
            break
    return page.state

def sync_page(page, index):
    while page.pending:
        bucket = page.next_index()
        header(bucket)
        if not bucket.valid:
            break
    return page.state

def audit_index(page):
    durability = schema(page)
    if durability is None:
        raise ValueError('missing index')
    schema(durability)
    return durability
