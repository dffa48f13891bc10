"""Two-condition listening protocol: planning, trial capture, persistence, summaries.

Each participant hears every phrase once per condition (stimulus on / stimulus
off), with condition order counterbalanced by participant index and phrase
order drawn per condition from a seeded RNG recorded in the plan, so any
session is replayable. Ratings are SAM valence/arousal (9-point) per phrase
plus one 7-point closeness rating per condition. The log is append-only JSON
lines; summaries are recomputable from the log alone.
"""

from __future__ import annotations

import csv
import json
import random
import threading
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from statistics import fmean, median
from typing import Mapping, Sequence

from .errors import ConfigurationError, InputError, StateError, VibroAffectError
from .mapping import VibrationParams
from .pipeline import Pipeline
from .playback import Player

WITH_VIBRO = "with-vibro"
WITHOUT_VIBRO = "without-vibro"
CONDITIONS = (WITH_VIBRO, WITHOUT_VIBRO)

SAM_MIN, SAM_MAX = 1, 9
IOS_MIN, IOS_MAX = 1, 7

STATUS_PENDING = "pending"
STATUS_COMPLETED = "completed"
STATUS_SKIPPED = "skipped"


@dataclass(frozen=True)
class Phrase:
    id: int
    text: str
    source: str = "custom"
    text_ja: str | None = None


def load_phrases(path: str | Path) -> list[Phrase]:
    """Read a phrase set JSON file ({id, text, source} entries, unique ids)."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigurationError(f"cannot read phrase set {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"phrase set {path} is not valid JSON: {exc}") from exc
    entries = doc["phrases"] if isinstance(doc, dict) else doc
    phrases = []
    for entry in entries:
        try:
            phrases.append(
                Phrase(
                    id=int(entry["id"]),
                    text=str(entry["text"]),
                    source=str(entry.get("source", "custom")),
                    text_ja=entry.get("text_ja"),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"phrase set {path}: bad entry {entry!r}") from exc
    ids = [p.id for p in phrases]
    if len(set(ids)) != len(ids):
        raise ConfigurationError(f"phrase set {path}: duplicate phrase ids")
    if not phrases:
        raise ConfigurationError(f"phrase set {path}: empty")
    return phrases


def default_phrases() -> list[Phrase]:
    """The stock ten-phrase set shipped with the package."""
    text = resources.files("vibroaffect.data").joinpath("phrases.json").read_text("utf-8")
    doc = json.loads(text)
    return [
        Phrase(id=e["id"], text=e["text"], source=e["source"], text_ja=e.get("text_ja"))
        for e in doc["phrases"]
    ]


@dataclass(frozen=True)
class SessionPlan:
    participant_id: str
    condition_order: tuple[str, str]
    phrase_orders: Mapping[str, tuple[int, ...]]  # condition -> phrase id permutation
    rng_seed: int

    def __post_init__(self):
        if sorted(self.condition_order) != sorted(CONDITIONS):
            raise InputError(f"condition_order must contain each of {CONDITIONS} once")
        reference = None
        for condition in self.condition_order:
            order = self.phrase_orders.get(condition)
            if order is None:
                raise InputError(f"missing phrase order for condition {condition!r}")
            if reference is None:
                reference = sorted(order)
            if sorted(order) != reference or len(set(order)) != len(order):
                raise InputError("each phrase order must be a permutation of the same id set")


def plan_session(
    participant_index: int,
    phrases: Sequence[Phrase],
    seed: int,
    participant_id: str | None = None,
) -> SessionPlan:
    """Deterministic counterbalanced plan for one participant.

    Even participant indices get the stimulus condition first, odd indices the
    reverse, so any even-sized sequential cohort is balanced. Phrase order is
    drawn independently per condition from an RNG keyed on (seed, index).
    """
    if not phrases:
        raise ConfigurationError("phrase set is empty")
    if participant_index < 0:
        raise InputError("participant_index must be >= 0")
    order = (
        (WITH_VIBRO, WITHOUT_VIBRO) if participant_index % 2 == 0 else (WITHOUT_VIBRO, WITH_VIBRO)
    )
    rng = random.Random(seed * 1_000_003 + participant_index)
    ids = [p.id for p in phrases]
    phrase_orders = {condition: tuple(rng.sample(ids, len(ids))) for condition in order}
    return SessionPlan(
        participant_id=participant_id or f"p{participant_index:03d}",
        condition_order=order,
        phrase_orders=phrase_orders,
        rng_seed=seed,
    )


@dataclass(frozen=True)
class TrialRecord:
    participant_id: str
    condition: str
    phrase_id: int
    status: str = STATUS_PENDING
    sam_valence: int | None = None
    sam_arousal: int | None = None
    vibration: VibrationParams | None = None
    timestamp: datetime | None = None
    error: str | None = None


@dataclass(frozen=True)
class IosRecord:
    participant_id: str
    condition: str
    ios: int
    timestamp: datetime


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def run_trial(
    plan: SessionPlan,
    phrase: Phrase,
    condition: str,
    pipeline: Pipeline,
    player: Player | None = None,
) -> TrialRecord:
    """Present one phrase and return a record awaiting SAM entry.

    Under the stimulus condition this estimates, maps, synthesizes, and (when
    a player is given) enqueues playback firing its start signal as the
    speech-onset stand-in. Without the stimulus, nothing is rendered. Any
    pipeline failure yields a skipped record rather than aborting the session.
    """
    if condition not in CONDITIONS:
        raise InputError(f"unknown condition {condition!r}")
    if phrase.id not in plan.phrase_orders[condition]:
        raise InputError(f"phrase {phrase.id} is not part of the session plan")
    if condition == WITHOUT_VIBRO:
        return TrialRecord(plan.participant_id, condition, phrase.id)
    try:
        result = pipeline.render(phrase.text)
    except VibroAffectError as exc:
        return TrialRecord(
            plan.participant_id,
            condition,
            phrase.id,
            status=STATUS_SKIPPED,
            timestamp=_utcnow(),
            error=str(exc),
        )
    if player is not None:
        queued = player.enqueue(result.buffer)
        queued.start()
    return TrialRecord(plan.participant_id, condition, phrase.id, vibration=result.params)


def _check_sam(value: int, name: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not SAM_MIN <= value <= SAM_MAX:
        raise InputError(f"{name} must be an integer in [{SAM_MIN}, {SAM_MAX}], got {value!r}")
    return value


def record_sam(
    record: TrialRecord,
    valence: int,
    arousal: int,
    log: "SessionLog | None" = None,
) -> TrialRecord:
    """Complete a pending trial with its two SAM ratings; appends to the log if given."""
    _check_sam(valence, "sam valence")
    _check_sam(arousal, "sam arousal")
    if record.status != STATUS_PENDING:
        raise StateError(f"trial is {record.status}; ratings can only be entered once")
    completed = replace(
        record,
        status=STATUS_COMPLETED,
        sam_valence=valence,
        sam_arousal=arousal,
        timestamp=_utcnow(),
    )
    if log is not None:
        log.append_trial(completed)
    return completed


def record_ios(
    participant_id: str,
    condition: str,
    ios: int,
    log: "SessionLog | None" = None,
) -> IosRecord:
    if condition not in CONDITIONS:
        raise InputError(f"unknown condition {condition!r}")
    if not isinstance(ios, int) or isinstance(ios, bool) or not IOS_MIN <= ios <= IOS_MAX:
        raise InputError(f"ios must be an integer in [{IOS_MIN}, {IOS_MAX}], got {ios!r}")
    rec = IosRecord(participant_id, condition, ios, _utcnow())
    if log is not None:
        log.append_ios(rec)
    return rec


# ---------------------------------------------------------------------------
# Persistence: append-only JSON lines

SCHEMA_VERSION = 1


def _trial_payload(rec: TrialRecord) -> dict:
    return {
        "kind": "trial",
        "schema": SCHEMA_VERSION,
        "participant_id": rec.participant_id,
        "condition": rec.condition,
        "phrase_id": rec.phrase_id,
        "status": rec.status,
        "sam_valence": rec.sam_valence,
        "sam_arousal": rec.sam_arousal,
        "vibration": rec.vibration.as_dict() if rec.vibration else None,
        "timestamp": rec.timestamp.isoformat() if rec.timestamp else None,
        "error": rec.error,
    }


def _ios_payload(rec: IosRecord) -> dict:
    return {
        "kind": "ios",
        "schema": SCHEMA_VERSION,
        "participant_id": rec.participant_id,
        "condition": rec.condition,
        "ios": rec.ios,
        "timestamp": rec.timestamp.isoformat(),
    }


def _trial_from_payload(doc: dict) -> TrialRecord:
    vib = doc.get("vibration")
    ts = doc.get("timestamp")
    return TrialRecord(
        participant_id=doc["participant_id"],
        condition=doc["condition"],
        phrase_id=doc["phrase_id"],
        status=doc["status"],
        sam_valence=doc.get("sam_valence"),
        sam_arousal=doc.get("sam_arousal"),
        vibration=VibrationParams(**vib) if vib else None,
        timestamp=datetime.fromisoformat(ts) if ts else None,
        error=doc.get("error"),
    )


def _ios_from_payload(doc: dict) -> IosRecord:
    return IosRecord(
        participant_id=doc["participant_id"],
        condition=doc["condition"],
        ios=doc["ios"],
        timestamp=datetime.fromisoformat(doc["timestamp"]),
    )


class SessionLog:
    """Append-only JSONL store; one record per line, schema-versioned.

    Appends are serialized by a lock. Loading tolerates a truncated final
    line (interrupted write) but rejects corruption anywhere earlier.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def _append(self, payload: dict) -> None:
        line = json.dumps(payload, ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def append_trial(self, rec: TrialRecord) -> None:
        self._append(_trial_payload(rec))

    def append_ios(self, rec: IosRecord) -> None:
        self._append(_ios_payload(rec))

    @staticmethod
    def load(path: str | Path) -> tuple[list[TrialRecord], list[IosRecord]]:
        trials: list[TrialRecord] = []
        ios: list[IosRecord] = []
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise ConfigurationError(f"cannot read session log {path}: {exc}") from exc
        last = len(lines) - 1
        for i, line in enumerate(lines):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                if i == last:
                    break  # torn tail from an interrupted append
                raise ConfigurationError(f"{path}:{i + 1}: corrupt log line") from exc
            if doc.get("schema") != SCHEMA_VERSION:
                raise ConfigurationError(f"{path}:{i + 1}: unsupported schema {doc.get('schema')!r}")
            if doc.get("kind") == "trial":
                trials.append(_trial_from_payload(doc))
            elif doc.get("kind") == "ios":
                ios.append(_ios_from_payload(doc))
            else:
                raise ConfigurationError(f"{path}:{i + 1}: unknown record kind {doc.get('kind')!r}")
        return trials, ios


# ---------------------------------------------------------------------------
# Aggregation

@dataclass(frozen=True)
class ConditionStats:
    n: int
    valence_mean: float
    valence_median: float
    arousal_mean: float
    arousal_median: float


@dataclass
class SummaryReport:
    conditions: dict[str, ConditionStats] = field(default_factory=dict)
    # (phrase_id, condition) -> scale -> rating -> count
    rating_counts: dict[tuple[int, str], dict[str, Counter]] = field(default_factory=dict)
    ios_means: dict[str, float] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not (self.conditions or self.rating_counts or self.ios_means)


def summarize(trials: Sequence[TrialRecord], ios_records: Sequence[IosRecord]) -> SummaryReport:
    """Per-condition central tendencies plus per-phrase rating count tables.

    Only completed trials contribute; skipped and pending ones are excluded.
    Empty input yields an empty report.
    """
    report = SummaryReport()
    completed = [t for t in trials if t.status == STATUS_COMPLETED]
    by_condition: dict[str, list[TrialRecord]] = {}
    for t in completed:
        by_condition.setdefault(t.condition, []).append(t)
    for condition, recs in sorted(by_condition.items()):
        valences = [t.sam_valence for t in recs]
        arousals = [t.sam_arousal for t in recs]
        report.conditions[condition] = ConditionStats(
            n=len(recs),
            valence_mean=fmean(valences),
            valence_median=median(valences),
            arousal_mean=fmean(arousals),
            arousal_median=median(arousals),
        )
    for t in completed:
        key = (t.phrase_id, t.condition)
        scales = report.rating_counts.setdefault(
            key, {"valence": Counter(), "arousal": Counter()}
        )
        scales["valence"][t.sam_valence] += 1
        scales["arousal"][t.sam_arousal] += 1
    by_condition_ios: dict[str, list[int]] = {}
    for rec in ios_records:
        by_condition_ios.setdefault(rec.condition, []).append(rec.ios)
    for condition, values in sorted(by_condition_ios.items()):
        report.ios_means[condition] = fmean(values)
    return report


def export_summary_csv(report: SummaryReport, path: str | Path) -> None:
    """Write the summary as a tidy UTF-8 CSV with a header row."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["section", "condition", "phrase_id", "scale", "rating", "value"])
        for condition, stats in sorted(report.conditions.items()):
            writer.writerow(["condition_n", condition, "", "", "", stats.n])
            writer.writerow(["condition_mean", condition, "", "valence", "", stats.valence_mean])
            writer.writerow(["condition_median", condition, "", "valence", "", stats.valence_median])
            writer.writerow(["condition_mean", condition, "", "arousal", "", stats.arousal_mean])
            writer.writerow(["condition_median", condition, "", "arousal", "", stats.arousal_median])
        for (phrase_id, condition), scales in sorted(report.rating_counts.items()):
            for scale in ("valence", "arousal"):
                for rating, count in sorted(scales[scale].items()):
                    writer.writerow(["rating_count", condition, phrase_id, scale, rating, count])
        for condition, mean in sorted(report.ios_means.items()):
            writer.writerow(["ios_mean", condition, "", "", "", mean])


# ---------------------------------------------------------------------------
# Interactive session state machine

PHASE_IDLE = "idle"
PHASE_PLAYING = "playing"
PHASE_AWAITING_SAM = "awaiting-sam"
PHASE_AWAITING_IOS = "awaiting-ios"
PHASE_DONE = "done"


class SessionRunner:
    """Single-writer state machine driving one participant through both conditions.

    Phases move idle -> playing -> awaiting-sam -> (idle | awaiting-ios), with
    awaiting-ios closing each condition and the second one ending in done.
    The server side is authoritative: every mutation happens under a lock and
    final records append straight to the log, so a crashed client can rebuild
    its view from ``state()`` at any time. Rating submissions carry optional
    client nonces and replay idempotently.
    """

    def __init__(
        self,
        plan: SessionPlan,
        phrases: Sequence[Phrase],
        pipeline: Pipeline,
        log: SessionLog | None = None,
        player: Player | None = None,
    ):
        self.plan = plan
        self.phrases = {p.id: p for p in phrases}
        plan_ids = set(plan.phrase_orders[plan.condition_order[0]])
        if not plan_ids <= set(self.phrases):
            raise ConfigurationError("plan references phrase ids missing from the phrase set")
        self.pipeline = pipeline
        self.log = log
        self.player = player
        self.phase = PHASE_IDLE
        self.condition_index = 0
        self.phrase_pos = 0
        self.trials: list[TrialRecord] = []
        self.ios_records: list[IosRecord] = []
        self._pending: TrialRecord | None = None
        self._current_phrase_id: int | None = None
        self._last_trial: TrialRecord | None = None
        self._nonces: dict[str, dict] = {}
        self.history: list[str] = [PHASE_IDLE]
        self._lock = threading.RLock()

    # -- views ------------------------------------------------------------

    @property
    def condition(self) -> str | None:
        if self.condition_index >= len(self.plan.condition_order):
            return None
        return self.plan.condition_order[self.condition_index]

    def _order(self) -> tuple[int, ...]:
        return self.plan.phrase_orders[self.condition]

    def state(self) -> dict:
        with self._lock:
            per_condition = len(self.plan.phrase_orders[self.plan.condition_order[0]])
            next_phrase_id = None
            if self.phase == PHASE_IDLE and self.condition is not None:
                next_phrase_id = self._order()[self.phrase_pos]
            current = None
            if self._current_phrase_id is not None:
                phrase = self.phrases[self._current_phrase_id]
                current = {"id": phrase.id, "text": phrase.text}
            last = None
            if self._last_trial is not None:
                t = self._last_trial
                last = {
                    "phrase_id": t.phrase_id,
                    "condition": t.condition,
                    "status": t.status,
                    "vibration": t.vibration.as_dict() if t.vibration else None,
                    "error": t.error,
                }
            return {
                "participant_id": self.plan.participant_id,
                "phase": self.phase,
                "condition": self.condition,
                "condition_index": self.condition_index,
                "phrase_position": self.phrase_pos,
                "phrases_per_condition": per_condition,
                "trials_total": 2 * per_condition,
                "trials_done": len(self.trials),
                "current_phrase": current,
                "next_phrase_id": next_phrase_id,
                "last_trial": last,
                "ios_done": len(self.ios_records),
                "plan": {
                    "participant_id": self.plan.participant_id,
                    "condition_order": list(self.plan.condition_order),
                    "phrase_orders": {
                        c: list(o) for c, o in self.plan.phrase_orders.items()
                    },
                    "rng_seed": self.plan.rng_seed,
                },
                "history": list(self.history),
            }

    # -- transitions -------------------------------------------------------

    def _enter(self, phase: str) -> None:
        self.phase = phase
        self.history.append(phase)

    def advance(self) -> dict:
        """Operator action: present the next planned phrase."""
        with self._lock:
            if self.phase != PHASE_IDLE:
                raise StateError(f"cannot advance while {self.phase}")
            phrase_id = self._order()[self.phrase_pos]
            phrase = self.phrases[phrase_id]
            self._current_phrase_id = phrase_id
            self._enter(PHASE_PLAYING)
            trial = run_trial(self.plan, phrase, self.condition, self.pipeline, self.player)
            self.phrase_pos += 1
            self._last_trial = trial
            if trial.status == STATUS_SKIPPED:
                self.trials.append(trial)
                if self.log is not None:
                    self.log.append_trial(trial)
                self._current_phrase_id = None
                self._enter(self._after_phrase_phase())
            else:
                self._pending = trial
                self._enter(PHASE_AWAITING_SAM)
            return self.state()

    def _after_phrase_phase(self) -> str:
        return PHASE_AWAITING_IOS if self.phrase_pos >= len(self._order()) else PHASE_IDLE

    def submit_sam(self, valence: int, arousal: int, nonce: str | None = None) -> dict:
        """Participant action: rate the phrase just heard."""
        with self._lock:
            if nonce is not None and nonce in self._nonces:
                return self._nonces[nonce]
            if self.phase != PHASE_AWAITING_SAM or self._pending is None:
                raise StateError(f"no trial awaiting ratings (phase is {self.phase})")
            completed = record_sam(self._pending, valence, arousal, log=self.log)
            self.trials.append(completed)
            self._last_trial = completed
            self._pending = None
            self._current_phrase_id = None
            self._enter(self._after_phrase_phase())
            response = self.state()
            if nonce is not None:
                self._nonces[nonce] = response
            return response

    def submit_ios(self, ios: int, nonce: str | None = None) -> dict:
        """Participant action: closeness rating at the end of a condition."""
        with self._lock:
            if nonce is not None and nonce in self._nonces:
                return self._nonces[nonce]
            if self.phase != PHASE_AWAITING_IOS:
                raise StateError(f"no condition awaiting a closeness rating (phase is {self.phase})")
            rec = record_ios(self.plan.participant_id, self.condition, ios, log=self.log)
            self.ios_records.append(rec)
            if self.condition_index + 1 >= len(self.plan.condition_order):
                self._enter(PHASE_DONE)
            else:
                self.condition_index += 1
                self.phrase_pos = 0
                self._enter(PHASE_IDLE)
            response = self.state()
            if nonce is not None:
                self._nonces[nonce] = response
            return response

    @property
    def done(self) -> bool:
        return self.phase == PHASE_DONE


def run_scripted_session(
    plan: SessionPlan,
    phrases: Sequence[Phrase],
    pipeline: Pipeline,
    log: SessionLog | None = None,
    player: Player | None = None,
    rate_fn=None,
    ios_fn=None,
) -> SessionRunner:
    """Drive a full session with scripted ratings (simulation / smoke runs).

    ``rate_fn(condition, phrase_id) -> (valence, arousal)`` and
    ``ios_fn(condition) -> int`` default to neutral midpoints.
    """
    rate_fn = rate_fn or (lambda condition, phrase_id: (5, 5))
    ios_fn = ios_fn or (lambda condition: 4)
    runner = SessionRunner(plan, phrases, pipeline, log=log, player=player)
    while not runner.done:
        if runner.phase == PHASE_IDLE:
            runner.advance()
        elif runner.phase == PHASE_AWAITING_SAM:
            phrase_id = runner._last_trial.phrase_id
            valence, arousal = rate_fn(runner.condition, phrase_id)
            runner.submit_sam(valence, arousal)
        elif runner.phase == PHASE_AWAITING_IOS:
            runner.submit_ios(ios_fn(runner.condition))
        else:  # pragma: no cover - defensive
            raise StateError(f"unexpected phase {runner.phase}")
    return runner
