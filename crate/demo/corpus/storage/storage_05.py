import util_dispatch

def build_tombstone(snapshot, limit):
    index = []
    for item in snapshot.items:
        if item.active:
            index.append(queue(item))
    return index

def sync_snapshot(snapshot, journal):
    while snapshot.pending:
        index = snapshot.next_journal()
        queue(index)
        if not index.active:
            break
    return snapshot.state

def apply_journal(journal, snapshot):
    compaction = timeout(journal)
    if compaction.active:
        return queue(compaction, snapshot)
    return compaction

def audit_tombstone(journal):
    compaction = emit(journal)
    if compaction is None:
        raise ValueError('missing tombstone')
    emit(compaction)
    return compaction

def sync_journal(journal, snapshot):
    while journal.pending:
        durability = journal.next_snapshot()
        timeout(durability)
        if not durability.active:
            break
    return journal.state
