"""Event-sourced store of reading history, library, and suppressions.

Every mutation is an appended event; all derived views (history, library,
engagement, window) fold deterministically from the log, so the live state
always equals a replay. The log is newline-delimited JSON; a truncated or
garbled tail recovers to the last valid sequence number with a report.
"""

import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Optional

from citelens.errors import CorruptLog, InvalidEvent, UnknownPaper

logger = logging.getLogger(__name__)

KIND_OPEN = "open"
KIND_SCROLL = "scroll"
KIND_MARK_READ = "mark_read"
KIND_SAVE = "save"
KIND_UNSAVE = "unsave"
KIND_DELETE_HISTORY = "delete_history"
KIND_SUPPRESS = "suppress_highlight"
KIND_UNSUPPRESS = "unsuppress_highlight"
KIND_CARD_OPEN = "card_open"
KIND_SET_WINDOW = "set_window"

EVENT_KINDS = frozenset(
    {
        KIND_OPEN,
        KIND_SCROLL,
        KIND_MARK_READ,
        KIND_SAVE,
        KIND_UNSAVE,
        KIND_DELETE_HISTORY,
        KIND_SUPPRESS,
        KIND_UNSUPPRESS,
        KIND_CARD_OPEN,
        KIND_SET_WINDOW,
    }
)

DEFAULT_WINDOW = 20
WINDOW_MIN = 1
WINDOW_MAX = 50

# Augmentation classes toggleable from the overview panel; all on by default.
TOGGLE_CLASSES = ("own", "cited_by_own", "reencountered", "saved", "visited")


@dataclass(frozen=True)
class ActivityEvent:
    seq: int
    ts: float
    kind: str
    paper_id: str
    payload: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "ts": self.ts,
            "kind": self.kind,
            "paper_id": self.paper_id,
            "payload": self.payload,
        }


@dataclass(frozen=True)
class Provenance:
    source_paper_id: str
    citing_sentence: str
    saved_at: float

    def to_dict(self) -> dict:
        return {
            "source_paper_id": self.source_paper_id,
            "citing_sentence": self.citing_sentence,
            "saved_at": self.saved_at,
        }


@dataclass(frozen=True)
class HistoryEntry:
    paper_id: str
    last_opened: float
    progress: float
    saved: bool


@dataclass
class _PaperRecord:
    last_opened: float = 0.0
    progress: float = 0.0

    def copy(self):
        return _PaperRecord(last_opened=self.last_opened, progress=self.progress)


@dataclass
class ActivityState:
    """Derived view of the full event log. Mutated only by `apply`."""

    records: dict = field(default_factory=dict)  # paper_id -> _PaperRecord (opened, not deleted)
    library: dict = field(default_factory=dict)  # paper_id -> Optional[Provenance]
    suppressed: set = field(default_factory=set)
    window: int = DEFAULT_WINDOW
    last_seq: int = 0

    def copy(self) -> "ActivityState":
        return ActivityState(
            records={pid: rec.copy() for pid, rec in self.records.items()},
            library=dict(self.library),
            suppressed=set(self.suppressed),
            window=self.window,
            last_seq=self.last_seq,
        )

    def apply(self, event: ActivityEvent) -> None:
        kind, pid = event.kind, event.paper_id
        if kind == KIND_OPEN:
            rec = self.records.setdefault(pid, _PaperRecord())
            rec.last_opened = event.ts
        elif kind == KIND_SCROLL:
            if pid in self.records:
                frac = event.payload["fraction"]
                if frac > self.records[pid].progress:
                    self.records[pid].progress = frac
        elif kind == KIND_MARK_READ:
            if pid in self.records:
                self.records[pid].progress = 1.0
        elif kind == KIND_SAVE:
            if pid not in self.library:
                prov = event.payload.get("provenance")
                self.library[pid] = (
                    Provenance(
                        source_paper_id=prov["source_paper_id"],
                        citing_sentence=prov["citing_sentence"],
                        saved_at=prov.get("saved_at", event.ts),
                    )
                    if prov
                    else None
                )
        elif kind == KIND_UNSAVE:
            self.library.pop(pid, None)
        elif kind == KIND_DELETE_HISTORY:
            self.records.pop(pid, None)
        elif kind == KIND_SUPPRESS:
            self.suppressed.add(pid)
        elif kind == KIND_UNSUPPRESS:
            self.suppressed.discard(pid)
        elif kind == KIND_SET_WINDOW:
            self.window = event.payload["window_size"]
        elif kind == KIND_CARD_OPEN:
            pass  # analytics only; no derived-state effect
        else:  # pragma: no cover - validated before apply
            raise InvalidEvent(f"unknown kind {kind!r}")
        self.last_seq = event.seq

    # -- derived views ------------------------------------------------------

    def reading_history(self, window: Optional[int] = None) -> list:
        """Most recently opened distinct papers, newest first, truncated.

        Recency is by open time only; saves and card opens never reorder.
        """
        w = self.window if window is None else window
        if w < 1:
            raise InvalidEvent(f"window must be >= 1, got {w}")
        ordered = sorted(
            self.records.items(), key=lambda item: (-item[1].last_opened, item[0])
        )
        return [
            HistoryEntry(
                paper_id=pid,
                last_opened=rec.last_opened,
                progress=rec.progress,
                saved=pid in self.library,
            )
            for pid, rec in ordered[:w]
        ]

    def engagement(self, paper_id: str):
        rec = self.records.get(paper_id)
        return (rec.progress if rec else 0.0, paper_id in self.library)

    def visited(self, paper_id: str) -> bool:
        return paper_id in self.records

    def saved(self, paper_id: str) -> bool:
        return paper_id in self.library

    def provenance(self, paper_id: str) -> Optional[Provenance]:
        return self.library.get(paper_id)


def validate_event(kind: str, paper_id: str, payload: dict) -> dict:
    """Check payload shape per kind; returns the normalized payload.

    Scroll fractions are quantized to 2 decimals so every downstream score
    is a sum of centipoint integers (exact replay equality).
    """
    if kind not in EVENT_KINDS:
        raise InvalidEvent(f"unknown event kind {kind!r}")
    payload = dict(payload or {})
    if kind == KIND_SCROLL:
        try:
            frac = float(payload["fraction"])
        except (KeyError, TypeError, ValueError):
            raise InvalidEvent("scroll event requires numeric 'fraction'")
        if not 0.0 <= frac <= 1.0:
            raise InvalidEvent(f"scroll fraction {frac} outside [0, 1]")
        payload["fraction"] = round(frac, 2)
    elif kind == KIND_SET_WINDOW:
        try:
            w = int(payload["window_size"])
        except (KeyError, TypeError, ValueError):
            raise InvalidEvent("set_window event requires integer 'window_size'")
        if not WINDOW_MIN <= w <= WINDOW_MAX:
            raise InvalidEvent(f"window_size {w} outside [{WINDOW_MIN}, {WINDOW_MAX}]")
        payload["window_size"] = w
    elif kind == KIND_SAVE:
        prov = payload.get("provenance")
        if prov is not None:
            if not isinstance(prov, dict) or not prov.get("citing_sentence") or not prov.get("source_paper_id"):
                raise InvalidEvent("save provenance requires source_paper_id and citing_sentence")
    elif kind == KIND_CARD_OPEN:
        if not payload.get("reading_paper_id"):
            raise InvalidEvent("card_open event requires 'reading_paper_id'")
        payload.setdefault("augmentation_class", "none")
    if kind != KIND_SET_WINDOW and not paper_id:
        raise InvalidEvent(f"{kind} event requires a paper_id")
    return payload


def event_from_dict(raw: dict) -> ActivityEvent:
    for key in ("seq", "ts", "kind", "paper_id"):
        if key not in raw:
            raise InvalidEvent(f"event record missing {key!r}")
    return ActivityEvent(
        seq=int(raw["seq"]),
        ts=float(raw["ts"]),
        kind=raw["kind"],
        paper_id=raw["paper_id"],
        payload=dict(raw.get("payload") or {}),
    )


@dataclass
class RecoveryReport:
    last_valid_seq: int
    error: Optional[str] = None

    @property
    def clean(self) -> bool:
        return self.error is None


def replay(events) -> ActivityState:
    """Pure deterministic fold of an event sequence."""
    state = ActivityState()
    for event in events:
        state.apply(event)
    return state


def read_log(path: str):
    """Parse the ndjson log, stopping at the first malformed or out-of-order line.

    Returns (events, RecoveryReport); the report carries the CorruptLog
    detail when the tail was unusable.
    """
    events = []
    error = None
    expected = 1
    with open(path, "r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                event = event_from_dict(json.loads(line))
                validate_event(event.kind, event.paper_id, event.payload)
                if event.seq != expected:
                    raise CorruptLog(
                        f"line {lineno}: expected seq {expected}, found {event.seq}",
                        last_valid_seq=expected - 1,
                    )
            except (json.JSONDecodeError, InvalidEvent, ValueError, TypeError) as e:
                error = f"line {lineno}: {e}"
                break
            except CorruptLog as e:
                error = str(e)
                break
            events.append(event)
            expected += 1
    return events, RecoveryReport(last_valid_seq=expected - 1, error=error)


class ActivityStore:
    """Append-only durable event log with an incrementally maintained state.

    Single-writer: appends serialize behind a lock and hit disk (flush +
    fsync by default) before the new state is published. `paper_exists`
    guards save/unsave targets when a corpus is wired in.
    """

    def __init__(self, data_dir: str, paper_exists=None, fsync: bool = True, clock=time.time):
        self.data_dir = data_dir
        self.log_path = os.path.join(data_dir, "events.log")
        self.snapshot_path = os.path.join(data_dir, "snapshot.json")
        self._paper_exists = paper_exists
        self._fsync = fsync
        self._clock = clock
        self._lock = threading.RLock()
        self._events = []
        self.recovery: Optional[RecoveryReport] = None
        os.makedirs(data_dir, exist_ok=True)
        self._state = self._load()
        self._log_file = open(self.log_path, "a", encoding="utf-8")

    def close(self) -> None:
        with self._lock:
            if not self._log_file.closed:
                self._log_file.close()

    def __del__(self):  # best effort; close() is the real API
        try:
            self.close()
        except Exception:
            pass

    # -- loading ------------------------------------------------------------

    def _load(self) -> ActivityState:
        snap_state, snap_seq = None, 0
        if os.path.exists(self.snapshot_path):
            with open(self.snapshot_path, "r", encoding="utf-8") as f:
                snap = json.load(f)
            snap_state = state_from_dict(snap["state"])
            snap_seq = int(snap["last_seq"])
        if os.path.exists(self.log_path):
            events, report = read_log(self.log_path)
            self.recovery = report
            if report.error:
                logger.warning("event log recovery: %s", report.error)
        else:
            events, self.recovery = [], RecoveryReport(last_valid_seq=0)
        self._events = events
        last_log_seq = events[-1].seq if events else 0
        if snap_state is not None and snap_seq <= last_log_seq:
            state = snap_state
            for event in events:
                if event.seq > snap_seq:
                    state.apply(event)
            return state
        # no snapshot, or snapshot ahead of a (possibly truncated) log:
        # the log is the source of truth, fold it from scratch
        return replay(events)

    # -- views ----------------------------------------------------------------

    @property
    def state(self) -> ActivityState:
        return self._state

    def events(self) -> list:
        return list(self._events)

    def save_snapshot(self) -> None:
        with self._lock:
            snap = {"last_seq": self._state.last_seq, "state": state_to_dict(self._state)}
            tmp = self.snapshot_path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as f:
                json.dump(snap, f, ensure_ascii=False)
            os.replace(tmp, self.snapshot_path)

    # -- mutation ---------------------------------------------------------------

    def append(self, kind: str, paper_id: str = "", payload: Optional[dict] = None, ts: Optional[float] = None) -> int:
        payload = validate_event(kind, paper_id, payload or {})
        if kind in (KIND_SAVE, KIND_UNSAVE) and self._paper_exists is not None:
            if not self._paper_exists(paper_id):
                raise UnknownPaper(paper_id)
        with self._lock:
            event = ActivityEvent(
                seq=self._state.last_seq + 1,
                ts=self._clock() if ts is None else float(ts),
                kind=kind,
                paper_id=paper_id,
                payload=payload,
            )
            line = json.dumps(event.to_dict(), ensure_ascii=False)
            self._log_file.write(line + "\n")
            self._log_file.flush()
            if self._fsync:
                os.fsync(self._log_file.fileno())
            self._events.append(event)
            self._state.apply(event)
            return event.seq

    # convenience wrappers used by the service layer

    def save_paper(self, paper_id: str, provenance: Optional[Provenance] = None, ts: Optional[float] = None) -> int:
        payload = {}
        if provenance is not None:
            payload["provenance"] = provenance.to_dict()
        return self.append(KIND_SAVE, paper_id, payload, ts=ts)

    def unsave_paper(self, paper_id: str, ts: Optional[float] = None) -> int:
        return self.append(KIND_UNSAVE, paper_id, ts=ts)


def state_to_dict(state: ActivityState) -> dict:
    return {
        "records": {
            pid: {"last_opened": rec.last_opened, "progress": rec.progress}
            for pid, rec in sorted(state.records.items())
        },
        "library": {
            pid: (prov.to_dict() if prov else None) for pid, prov in sorted(state.library.items())
        },
        "suppressed": sorted(state.suppressed),
        "window": state.window,
        "last_seq": state.last_seq,
    }


def state_from_dict(raw: dict) -> ActivityState:
    state = ActivityState(window=raw.get("window", DEFAULT_WINDOW), last_seq=raw.get("last_seq", 0))
    for pid, rec in raw.get("records", {}).items():
        state.records[pid] = _PaperRecord(last_opened=rec["last_opened"], progress=rec["progress"])
    for pid, prov in raw.get("library", {}).items():
        state.library[pid] = (
            Provenance(
                source_paper_id=prov["source_paper_id"],
                citing_sentence=prov["citing_sentence"],
                saved_at=prov["saved_at"],
            )
            if prov
            else None
        )
    state.suppressed = set(raw.get("suppressed", []))
    return state


def states_equal(a: ActivityState, b: ActivityState) -> bool:
    return state_to_dict(a) == state_to_dict(b)
