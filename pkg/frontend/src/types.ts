// Wire types for the session service (JSON over HTTP).

export type Condition = "with-vibro" | "without-vibro";

export type Phase = "idle" | "playing" | "awaiting-sam" | "awaiting-ios" | "done";

export interface PlanView {
  participant_id: string;
  condition_order: Condition[];
  phrase_orders: Record<string, number[]>;
  rng_seed: number;
}

export interface PhraseView {
  id: number;
  text: string;
}

export interface VibrationView {
  frequency_hz: number;
  amplitude: number;
  duration_s: number;
}

export interface TrialView {
  phrase_id: number;
  condition: Condition;
  status: "pending" | "completed" | "skipped";
  vibration: VibrationView | null;
  error: string | null;
}

export interface SessionState {
  participant_id: string;
  phase: Phase;
  condition: Condition | null;
  condition_index: number;
  phrase_position: number;
  phrases_per_condition: number;
  trials_total: number;
  trials_done: number;
  current_phrase: PhraseView | null;
  next_phrase_id: number | null;
  last_trial: TrialView | null;
  ios_done: number;
  plan: PlanView;
  history: Phase[];
}

export interface CreateSessionRequest {
  participant_index: number;
  seed: number;
  participant_id?: string;
}

export interface CreateSessionResponse {
  session_id: string;
  state: SessionState;
}

export interface ErrorBody {
  error: string;
  message?: string;
}
