// Operator and participant screens. Both render from the server state that
// SessionFlow mirrors; neither keeps protocol state of its own.

import { ApiError } from "./api.js";
import { SessionFlow } from "./flow.js";
import { buildIosRow } from "./ios.js";
import { buildSamRow } from "./sam.js";
import type { SessionState } from "./types.js";

const POLL_MS = 800;

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function banner(flow: SessionFlow): HTMLElement {
  const node = el("div", "banner");
  if (flow.lastNetworkError) {
    node.classList.add("banner-error");
    node.textContent = `Connection trouble: ${flow.lastNetworkError}. Retrying; nothing is lost.`;
  }
  return node;
}

function describePhase(state: SessionState): string {
  switch (state.phase) {
    case "idle":
      return state.trials_done === 0 && state.condition_index === 0
        ? "Ready to start."
        : "Ready for the next phrase.";
    case "playing":
      return "Presenting phrase...";
    case "awaiting-sam":
      return "Waiting for the participant's ratings.";
    case "awaiting-ios":
      return "Waiting for the closeness rating.";
    case "done":
      return "Session complete.";
  }
}

export class OperatorView {
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly flow: SessionFlow,
  ) {
    flow.onChange(() => this.render());
  }

  mount(): void {
    this.render();
    this.timer = setInterval(() => void this.flow.refresh(), POLL_MS);
  }

  unmount(): void {
    if (this.timer) clearInterval(this.timer);
  }

  private render(): void {
    const flow = this.flow;
    this.root.replaceChildren();
    this.root.appendChild(el("h1", "title", "Session operator"));
    this.root.appendChild(banner(flow));

    if (!flow.state) {
      this.root.appendChild(this.createForm());
      return;
    }
    const state = flow.state;
    const panel = el("div", "panel");
    panel.appendChild(el("div", "row", `Participant: ${state.participant_id}`));
    panel.appendChild(el("div", "row", `Session: ${flow.sessionId}`));
    panel.appendChild(
      el("div", "row", `Condition ${state.condition_index + 1}/2: ${state.condition ?? "-"}`),
    );
    panel.appendChild(el("div", "row progress", `Progress: ${flow.progressLabel}`));
    panel.appendChild(el("div", "row phase", describePhase(state)));
    if (state.phase === "awaiting-sam" && state.current_phrase) {
      panel.appendChild(el("div", "row phrase", `Played: "${state.current_phrase.text}"`));
    }
    if (state.last_trial?.status === "skipped") {
      panel.appendChild(
        el("div", "row warn", `Trial skipped: ${state.last_trial.error ?? "unknown error"}`),
      );
    }

    const advance = document.createElement("button");
    advance.textContent = state.trials_done === 0 ? "Start" : "Next phrase";
    advance.disabled = state.phase !== "idle";
    advance.addEventListener("click", () => {
      advance.disabled = true;
      void this.flow.advance().catch((err) => this.note(err));
    });
    panel.appendChild(advance);

    const link = el("div", "row hint");
    link.textContent = `Participant link: #/participant?session=${flow.sessionId}`;
    panel.appendChild(link);
    this.root.appendChild(panel);
  }

  private createForm(): HTMLElement {
    const form = el("div", "panel create-form");
    form.appendChild(el("h2", "subtitle", "New session"));
    const index = document.createElement("input");
    index.type = "number";
    index.value = "0";
    index.id = "participant-index";
    const seed = document.createElement("input");
    seed.type = "number";
    seed.value = "42";
    seed.id = "seed";
    const pid = document.createElement("input");
    pid.type = "text";
    pid.placeholder = "participant id (optional)";
    pid.id = "participant-id";
    for (const [label, input] of [
      ["Participant index", index],
      ["Seed", seed],
      ["Participant id", pid],
    ] as const) {
      const field = el("label", "field", label + " ");
      field.appendChild(input);
      form.appendChild(field);
    }
    const create = document.createElement("button");
    create.textContent = "Create session";
    create.addEventListener("click", () => {
      void this.flow
        .create(Number(index.value), Number(seed.value), pid.value || undefined)
        .catch((err) => this.note(err));
    });
    form.appendChild(create);
    return form;
  }

  private note(err: unknown): void {
    const text = err instanceof ApiError ? `${err.kind}: ${err.message}` : String(err);
    const node = el("div", "banner banner-error", text);
    this.root.prepend(node);
  }
}

export class ParticipantView {
  private timer: ReturnType<typeof setInterval> | null = null;
  private samValence: number | null = null;
  private samArousal: number | null = null;
  private iosChoice: number | null = null;
  private renderedPhase: string | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly flow: SessionFlow,
  ) {
    flow.onChange(() => this.render());
  }

  mount(): void {
    this.render();
    this.timer = setInterval(() => void this.flow.refresh(), POLL_MS);
  }

  unmount(): void {
    if (this.timer) clearInterval(this.timer);
  }

  private render(): void {
    const state = this.flow.state;
    const phaseKey = state ? `${state.phase}:${state.trials_done}:${state.ios_done}` : "none";
    if (phaseKey === this.renderedPhase) return; // keep selections while polling
    this.renderedPhase = phaseKey;
    this.samValence = this.samArousal = this.iosChoice = null;

    this.root.replaceChildren();
    this.root.appendChild(el("h1", "title", "Listening session"));
    this.root.appendChild(banner(this.flow));
    if (!state) {
      this.root.appendChild(el("div", "panel", "Waiting for the operator to share a session..."));
      return;
    }
    switch (state.phase) {
      case "idle":
      case "playing":
        this.root.appendChild(
          el("div", "panel listen", "Listen to the robot. Ratings open after each phrase."),
        );
        break;
      case "awaiting-sam":
        this.root.appendChild(this.samPanel());
        break;
      case "awaiting-ios":
        this.root.appendChild(this.iosPanel());
        break;
      case "done":
        this.root.appendChild(el("div", "panel done", "All done. Thank you!"));
        break;
    }
  }

  private samPanel(): HTMLElement {
    const panel = el("div", "panel sam-panel");
    panel.appendChild(el("h2", "subtitle", "How did that phrase make you feel?"));
    const submit = document.createElement("button");
    submit.textContent = "Submit ratings";
    submit.disabled = true;
    const update = () => {
      submit.disabled = this.samValence === null || this.samArousal === null;
    };
    const valenceRow = buildSamRow("valence", "Unpleasant - Pleasant", (level) => {
      this.samValence = level;
      update();
    });
    const arousalRow = buildSamRow("arousal", "Calm - Excited", (level) => {
      this.samArousal = level;
      update();
    });
    panel.appendChild(valenceRow.element);
    panel.appendChild(arousalRow.element);
    submit.addEventListener("click", () => {
      if (this.samValence === null || this.samArousal === null) return;
      submit.disabled = true; // double-click guard; nonce protects the wire too
      void this.flow.submitSam(this.samValence, this.samArousal).catch(() => update());
    });
    panel.appendChild(submit);
    return panel;
  }

  private iosPanel(): HTMLElement {
    const panel = el("div", "panel ios-panel");
    panel.appendChild(
      el("h2", "subtitle", "How close did you feel to the robot in this part?"),
    );
    const submit = document.createElement("button");
    submit.textContent = "Submit";
    submit.disabled = true;
    const row = buildIosRow((option) => {
      this.iosChoice = option;
      submit.disabled = false;
    });
    panel.appendChild(row.element);
    submit.addEventListener("click", () => {
      if (this.iosChoice === null) return;
      submit.disabled = true;
      void this.flow.submitIos(this.iosChoice).catch(() => {
        submit.disabled = false;
      });
    });
    panel.appendChild(submit);
    return panel;
  }
}
