"""Session planning, trials, persistence, and summaries."""

import json
import random
import statistics
from collections import Counter
from datetime import datetime, timezone

import pytest

from vibroaffect import (
    AffectScore,
    ConfigurationError,
    EstimationError,
    InputError,
    IosRecord,
    Phrase,
    Pipeline,
    SessionLog,
    SessionRunner,
    StateError,
    TrialRecord,
    default_phrases,
    export_summary_csv,
    load_phrases,
    plan_session,
    record_ios,
    record_sam,
    run_scripted_session,
    run_trial,
    summarize,
)
from vibroaffect.session import (
    PHASE_AWAITING_IOS,
    PHASE_AWAITING_SAM,
    PHASE_IDLE,
    STATUS_COMPLETED,
    STATUS_SKIPPED,
    WITH_VIBRO,
    WITHOUT_VIBRO,
)


@pytest.fixture
def phrases():
    return default_phrases()


class TestPhrases:
    def test_default_set(self, phrases):
        assert len(phrases) == 10
        assert sorted(p.id for p in phrases) == list(range(1, 11))

    def test_load_rejects_duplicate_ids(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps([{"id": 1, "text": "a"}, {"id": 1, "text": "b"}]))
        with pytest.raises(ConfigurationError):
            load_phrases(path)

    def test_load_plain_list(self, tmp_path):
        path = tmp_path / "p.json"
        path.write_text(json.dumps([{"id": 3, "text": "hey", "source": "custom"}]))
        assert load_phrases(path) == [Phrase(id=3, text="hey", source="custom")]


class TestPlanSession:
    def test_counterbalancing_over_six(self, phrases):
        plans = [plan_session(i, phrases, seed=42) for i in range(6)]
        vibro_first = [p for p in plans if p.condition_order[0] == WITH_VIBRO]
        assert len(vibro_first) == 3

    def test_even_index_gets_stimulus_first(self, phrases):
        assert plan_session(0, phrases, 1).condition_order == (WITH_VIBRO, WITHOUT_VIBRO)
        assert plan_session(1, phrases, 1).condition_order == (WITHOUT_VIBRO, WITH_VIBRO)

    def test_deterministic(self, phrases):
        assert plan_session(3, phrases, seed=99) == plan_session(3, phrases, seed=99)

    def test_orders_are_permutations(self, phrases):
        plan = plan_session(0, phrases, seed=42)
        for condition in plan.condition_order:
            assert sorted(plan.phrase_orders[condition]) == list(range(1, 11))

    def test_different_seeds_differ(self, phrases):
        a = plan_session(0, phrases, seed=1)
        b = plan_session(0, phrases, seed=2)
        assert a.phrase_orders != b.phrase_orders

    def test_empty_phrase_set(self):
        with pytest.raises(ConfigurationError):
            plan_session(0, [], seed=1)


class TestRunTrial:
    def test_without_stimulus_has_no_vibration(self, phrases, neutral_pipeline):
        plan = plan_session(0, phrases, 42)
        rec = run_trial(plan, phrases[0], WITHOUT_VIBRO, neutral_pipeline)
        assert rec.vibration is None
        assert rec.status == "pending"

    def test_with_stimulus_neutral_estimator(self, phrases, neutral_pipeline, null_player):
        plan = plan_session(0, phrases, 42)
        phrase = phrases[0]
        rec = run_trial(plan, phrase, WITH_VIBRO, neutral_pipeline, null_player)
        assert rec.vibration is not None
        assert rec.vibration.frequency_hz == 280.0
        assert rec.vibration.amplitude == 20384
        assert rec.vibration.duration_s == 0.5  # English text adds nothing

    def test_playback_enqueued_and_started(self, phrases, neutral_pipeline, null_player):
        plan = plan_session(0, phrases, 42)
        run_trial(plan, phrases[1], WITH_VIBRO, neutral_pipeline, null_player)
        deadline = 2.0
        import time

        t0 = time.monotonic()
        while not null_player.backend_record.played and time.monotonic() - t0 < deadline:
            time.sleep(0.005)
        assert len(null_player.backend_record.played) == 1

    def test_estimator_failure_marks_skipped(self, phrases):
        def explode(text):
            raise EstimationError("no luck", cause="transport", attempts=3)

        pipeline = Pipeline(estimate_fn=explode)
        plan = plan_session(0, phrases, 42)
        rec = run_trial(plan, phrases[0], WITH_VIBRO, pipeline)
        assert rec.status == STATUS_SKIPPED
        assert "no luck" in rec.error

    def test_foreign_phrase_rejected(self, phrases, neutral_pipeline):
        plan = plan_session(0, phrases, 42)
        with pytest.raises(InputError):
            run_trial(plan, Phrase(id=99, text="x"), WITH_VIBRO, neutral_pipeline)


class TestRecordSam:
    def pending(self):
        return TrialRecord("p000", WITH_VIBRO, 1)

    def test_completes(self):
        rec = record_sam(self.pending(), 5, 5)
        assert rec.status == STATUS_COMPLETED
        assert (rec.sam_valence, rec.sam_arousal) == (5, 5)
        assert rec.timestamp is not None

    def test_range_check(self):
        with pytest.raises(InputError):
            record_sam(self.pending(), 0, 5)
        with pytest.raises(InputError):
            record_sam(self.pending(), 5, 10)
        with pytest.raises(InputError):
            record_sam(self.pending(), True, 5)

    def test_double_entry(self):
        done = record_sam(self.pending(), 4, 4)
        with pytest.raises(StateError):
            record_sam(done, 4, 4)

    def test_ios_range(self):
        rec = record_ios("p000", WITH_VIBRO, 7)
        assert rec.ios == 7
        with pytest.raises(InputError):
            record_ios("p000", WITH_VIBRO, 8)
        with pytest.raises(InputError):
            record_ios("p000", WITH_VIBRO, 0)


class TestSummarize:
    def test_empty(self):
        report = summarize([], [])
        assert report.empty

    def test_two_records_same_phrase(self):
        recs = [
            record_sam(TrialRecord("p", WITH_VIBRO, 3), 4, 5),
            record_sam(TrialRecord("p", WITH_VIBRO, 3), 6, 5),
        ]
        report = summarize(recs, [])
        stats = report.conditions[WITH_VIBRO]
        assert stats.valence_mean == 5.0
        assert report.rating_counts[(3, WITH_VIBRO)]["valence"] == Counter({4: 1, 6: 1})

    def test_against_independent_fold(self):
        rng = random.Random(1234)
        trials = []
        ios = []
        for _ in range(300):
            condition = rng.choice([WITH_VIBRO, WITHOUT_VIBRO])
            trials.append(
                record_sam(
                    TrialRecord(f"p{rng.randrange(6):03d}", condition, rng.randrange(1, 11)),
                    rng.randrange(1, 10),
                    rng.randrange(1, 10),
                )
            )
        for _ in range(12):
            ios.append(
                IosRecord(
                    "p000",
                    rng.choice([WITH_VIBRO, WITHOUT_VIBRO]),
                    rng.randrange(1, 8),
                    datetime.now(timezone.utc),
                )
            )
        report = summarize(trials, ios)

        for condition in (WITH_VIBRO, WITHOUT_VIBRO):
            vals = [t.sam_valence for t in trials if t.condition == condition]
            aros = [t.sam_arousal for t in trials if t.condition == condition]
            stats = report.conditions[condition]
            assert stats.n == len(vals)
            assert stats.valence_mean == pytest.approx(statistics.mean(vals))
            assert stats.valence_median == statistics.median(vals)
            assert stats.arousal_mean == pytest.approx(statistics.mean(aros))
            assert stats.arousal_median == statistics.median(aros)
            ios_vals = [r.ios for r in ios if r.condition == condition]
            assert report.ios_means[condition] == pytest.approx(statistics.mean(ios_vals))

        counted = sum(
            sum(scales["valence"].values()) for scales in report.rating_counts.values()
        )
        assert counted == len(trials)

    def test_skipped_trials_excluded(self):
        recs = [
            record_sam(TrialRecord("p", WITH_VIBRO, 1), 9, 9),
            TrialRecord("p", WITH_VIBRO, 2, status=STATUS_SKIPPED, error="x"),
        ]
        report = summarize(recs, [])
        assert report.conditions[WITH_VIBRO].n == 1


class TestSessionLog:
    def test_replay_reproduces_summary(self, tmp_path, phrases, neutral_pipeline):
        log_path = tmp_path / "session.jsonl"
        log = SessionLog(log_path)
        rng = random.Random(5)
        runner = run_scripted_session(
            plan_session(0, phrases, 42),
            phrases,
            neutral_pipeline,
            log=log,
            rate_fn=lambda c, pid: (rng.randrange(1, 10), rng.randrange(1, 10)),
            ios_fn=lambda c: rng.randrange(1, 8),
        )
        trials, ios = SessionLog.load(log_path)
        assert len(trials) == 20 and len(ios) == 2
        assert summarize(trials, ios) == summarize(runner.trials, runner.ios_records)

    def test_torn_tail_tolerated(self, tmp_path, phrases, neutral_pipeline):
        log_path = tmp_path / "session.jsonl"
        log = SessionLog(log_path)
        run_scripted_session(plan_session(0, phrases, 42), phrases, neutral_pipeline, log=log)
        before = SessionLog.load(log_path)
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write('{"kind": "trial", "schema": 1, "participa')  # interrupted write
        after = SessionLog.load(log_path)
        assert before == after

    def test_corruption_mid_file_rejected(self, tmp_path):
        log_path = tmp_path / "session.jsonl"
        log = SessionLog(log_path)
        log.append_trial(record_sam(TrialRecord("p", WITH_VIBRO, 1), 5, 5))
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write("NOT JSON\n")
        log.append_ios(record_ios("p", WITH_VIBRO, 4))
        with pytest.raises(ConfigurationError):
            SessionLog.load(log_path)

    def test_vibration_roundtrip(self, tmp_path, phrases, neutral_pipeline, null_player):
        log_path = tmp_path / "session.jsonl"
        log = SessionLog(log_path)
        plan = plan_session(0, phrases, 42)
        rec = run_trial(plan, phrases[0], WITH_VIBRO, neutral_pipeline, null_player)
        record_sam(rec, 5, 6, log=log)
        trials, _ = SessionLog.load(log_path)
        assert trials[0].vibration == rec.vibration


class TestSessionRunner:
    def test_full_session_counts(self, phrases, neutral_pipeline, null_player):
        runner = run_scripted_session(
            plan_session(0, phrases, 42), phrases, neutral_pipeline, player=null_player
        )
        assert len(runner.trials) == 20
        assert len(runner.ios_records) == 2
        assert runner.done

    def test_without_vibro_records_carry_no_params(self, phrases, neutral_pipeline):
        runner = run_scripted_session(plan_session(1, phrases, 42), phrases, neutral_pipeline)
        without = [t for t in runner.trials if t.condition == WITHOUT_VIBRO]
        assert len(without) == 10
        assert all(t.vibration is None for t in without)
        with_v = [t for t in runner.trials if t.condition == WITH_VIBRO]
        assert all(t.vibration is not None for t in with_v if t.status == STATUS_COMPLETED)

    def test_phrase_order_follows_plan(self, phrases, neutral_pipeline):
        plan = plan_session(0, phrases, 42)
        runner = run_scripted_session(plan, phrases, neutral_pipeline)
        played = [t.phrase_id for t in runner.trials]
        expected = list(plan.phrase_orders[plan.condition_order[0]]) + list(
            plan.phrase_orders[plan.condition_order[1]]
        )
        assert played == expected

    def test_advance_guard(self, phrases, neutral_pipeline):
        runner = SessionRunner(plan_session(0, phrases, 42), phrases, neutral_pipeline)
        runner.advance()
        assert runner.phase == PHASE_AWAITING_SAM
        with pytest.raises(StateError):
            runner.advance()

    def test_sam_guard(self, phrases, neutral_pipeline):
        runner = SessionRunner(plan_session(0, phrases, 42), phrases, neutral_pipeline)
        with pytest.raises(StateError):
            runner.submit_sam(5, 5)

    def test_nonce_idempotency(self, phrases, neutral_pipeline):
        runner = SessionRunner(plan_session(0, phrases, 42), phrases, neutral_pipeline)
        runner.advance()
        first = runner.submit_sam(5, 6, nonce="abc")
        second = runner.submit_sam(5, 6, nonce="abc")
        assert first == second
        assert len(runner.trials) == 1

    def test_ios_closes_condition(self, phrases, neutral_pipeline):
        runner = SessionRunner(plan_session(0, phrases, 42), phrases, neutral_pipeline)
        for _ in range(10):
            runner.advance()
            runner.submit_sam(5, 5)
        assert runner.phase == PHASE_AWAITING_IOS
        runner.submit_ios(4)
        assert runner.phase == PHASE_IDLE
        assert runner.condition == WITHOUT_VIBRO

    def test_skipped_trial_continues_session(self, phrases, null_player):
        calls = {"n": 0}

        def flaky(text):
            calls["n"] += 1
            if calls["n"] == 3:
                raise EstimationError("flaky", cause="parse", attempts=1)
            return AffectScore.neutral()

        pipeline = Pipeline(estimate_fn=flaky)
        runner = run_scripted_session(
            plan_session(0, default_phrases(), 42), default_phrases(), pipeline,
            player=null_player,
        )
        skipped = [t for t in runner.trials if t.status == STATUS_SKIPPED]
        assert len(skipped) == 1
        assert len(runner.trials) == 20
        assert runner.done

    def test_legal_transitions_only(self, phrases, neutral_pipeline):
        runner = run_scripted_session(plan_session(0, phrases, 42), phrases, neutral_pipeline)
        legal = {
            "idle": {"playing"},
            "playing": {"awaiting-sam", "awaiting-ios", "idle"},
            "awaiting-sam": {"idle", "awaiting-ios"},
            "awaiting-ios": {"idle", "done"},
        }
        for prev, nxt in zip(runner.history, runner.history[1:]):
            assert nxt in legal[prev], f"{prev} -> {nxt}"

    def test_state_view(self, phrases, neutral_pipeline):
        runner = SessionRunner(plan_session(0, phrases, 42), phrases, neutral_pipeline)
        state = runner.state()
        assert state["phase"] == PHASE_IDLE
        assert state["trials_total"] == 20
        assert state["trials_done"] == 0
        assert state["next_phrase_id"] == runner.plan.phrase_orders[WITH_VIBRO][0]
        runner.advance()
        state = runner.state()
        assert state["current_phrase"]["id"] == runner.plan.phrase_orders[WITH_VIBRO][0]


class TestCsvExport:
    def test_export(self, tmp_path, phrases, neutral_pipeline):
        import csv

        runner = run_scripted_session(plan_session(0, phrases, 42), phrases, neutral_pipeline)
        report = summarize(runner.trials, runner.ios_records)
        path = tmp_path / "summary.csv"
        export_summary_csv(report, path)
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["section", "condition", "phrase_id", "scale", "rating", "value"]
        sections = {row[0] for row in rows[1:]}
        assert {"condition_mean", "condition_median", "rating_count", "ios_mean"} <= sections
        count_rows = [row for row in rows if row[0] == "rating_count" and row[3] == "valence"]
        assert sum(int(row[5]) for row in count_rows) == 20
