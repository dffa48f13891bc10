// Session flow controller shared by the operator and participant views.
//
// The server is authoritative: this class never advances its own copy of the
// state machine, it only mirrors what the endpoints return. Rating
// submissions get a client nonce per entry attempt; the nonce is kept until
// the server acknowledges, so a double click or a retried request lands as
// exactly one record.

import { ApiError, SessionApi } from "./api.js";
import { newNonce } from "./nonce.js";
import type { Condition, Phase, SessionState } from "./types.js";

export type FlowListener = (flow: SessionFlow) => void;

export class SessionFlow {
  state: SessionState | null = null;
  sessionId: string | null = null;
  /** phrase ids in the order the server actually presented them */
  readonly displayedOrder: number[] = [];
  /** network trouble indicator for the retry banner; cleared on success */
  lastNetworkError: string | null = null;

  private listeners: FlowListener[] = [];
  private busy = false;
  private samNonce: string | null = null;
  private iosNonce: string | null = null;

  constructor(private readonly api: SessionApi) {}

  onChange(listener: FlowListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this);
  }

  private setState(state: SessionState): void {
    this.state = state;
    this.lastNetworkError = null;
    this.emit();
  }

  get phase(): Phase | null {
    return this.state?.phase ?? null;
  }

  get condition(): Condition | null {
    return this.state?.condition ?? null;
  }

  async create(participantIndex: number, seed: number, participantId?: string): Promise<void> {
    const created = await this.api.createSession({
      participant_index: participantIndex,
      seed,
      participant_id: participantId,
    });
    this.sessionId = created.session_id;
    this.setState(created.state);
  }

  /** Attach to an existing session (participant view, reload recovery). */
  async attach(sessionId: string): Promise<void> {
    this.sessionId = sessionId;
    await this.refresh();
  }

  async refresh(): Promise<void> {
    if (!this.sessionId) return;
    try {
      this.setState(await this.api.getState(this.sessionId));
    } catch (err) {
      this.noteNetworkError(err);
    }
  }

  /** Operator: present the next planned phrase. Illegal phases are rejected
   * locally before any request goes out. */
  async advance(): Promise<SessionState> {
    this.requireSession();
    if (this.phase !== "idle") {
      throw new Error(`cannot advance while ${this.phase}`);
    }
    const state = await this.guarded(() => this.api.advance(this.sessionId!));
    if (state.current_phrase) {
      this.displayedOrder.push(state.current_phrase.id);
    } else if (state.last_trial) {
      this.displayedOrder.push(state.last_trial.phrase_id); // skipped trial
    }
    return state;
  }

  async submitSam(valence: number, arousal: number): Promise<SessionState> {
    this.requireSession();
    if (this.phase !== "awaiting-sam") {
      throw new Error(`no phrase awaiting ratings (phase is ${this.phase})`);
    }
    this.samNonce = this.samNonce ?? newNonce();
    const state = await this.guarded(() =>
      this.api.submitSam(this.sessionId!, valence, arousal, this.samNonce!),
    );
    this.samNonce = null; // acknowledged; next entry gets a fresh nonce
    return state;
  }

  async submitIos(ios: number): Promise<SessionState> {
    this.requireSession();
    if (this.phase !== "awaiting-ios") {
      throw new Error(`no condition awaiting a closeness rating (phase is ${this.phase})`);
    }
    this.iosNonce = this.iosNonce ?? newNonce();
    const state = await this.guarded(() =>
      this.api.submitIos(this.sessionId!, ios, this.iosNonce!),
    );
    this.iosNonce = null;
    return state;
  }

  get progressLabel(): string {
    if (!this.state) return "";
    return `${this.state.trials_done}/${this.state.trials_total} trials`;
  }

  /** The full planned phrase sequence (both conditions, in plan order). */
  plannedOrder(): number[] {
    if (!this.state) return [];
    const plan = this.state.plan;
    return plan.condition_order.flatMap((condition) => plan.phrase_orders[condition] ?? []);
  }

  private requireSession(): void {
    if (!this.sessionId) throw new Error("no session attached");
  }

  /** Serialize mutating calls: a second click while one is in flight is a
   * no-op at this layer (the nonce protects the wire besides). */
  private async guarded(call: () => Promise<SessionState>): Promise<SessionState> {
    if (this.busy && this.state) return this.state;
    this.busy = true;
    try {
      const state = await call();
      this.setState(state);
      return state;
    } catch (err) {
      if (!(err instanceof ApiError)) this.noteNetworkError(err);
      throw err;
    } finally {
      this.busy = false;
    }
  }

  private noteNetworkError(err: unknown): void {
    this.lastNetworkError = err instanceof Error ? err.message : String(err);
    this.emit();
  }
}
