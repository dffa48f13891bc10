// Entry point: hash routing between the operator and participant views.
// The service base URL defaults to the host serving the page (the session
// service mounts this app at /ui).

import { SessionApi } from "./api.js";
import { SessionFlow } from "./flow.js";
import { OperatorView, ParticipantView } from "./views.js";

function baseUrl(): string {
  const override = new URLSearchParams(window.location.search).get("service");
  return override ?? "";
}

type Mounted = { unmount(): void } | null;

let active: Mounted = null;

function route(): void {
  const root = document.getElementById("app");
  if (!root) return;
  active?.unmount();
  root.replaceChildren();

  const hash = window.location.hash || "#/";
  const [path, query] = hash.slice(1).split("?");
  const params = new URLSearchParams(query ?? "");
  const api = new SessionApi(baseUrl());
  const flow = new SessionFlow(api);

  if (path === "/operator") {
    const view = new OperatorView(root, flow);
    view.mount();
    active = view;
  } else if (path === "/participant") {
    const view = new ParticipantView(root, flow);
    const sessionId = params.get("session");
    if (sessionId) void flow.attach(sessionId);
    view.mount();
    active = view;
  } else {
    active = null;
    const menu = document.createElement("div");
    menu.className = "panel menu";
    menu.innerHTML =
      '<h1>Listening session</h1>' +
      '<p><a href="#/operator">Operator console</a></p>' +
      '<p><a href="#/participant">Participant screen</a> (needs ?session=... from the operator)</p>';
    root.appendChild(menu);
  }
}

window.addEventListener("hashchange", route);
window.addEventListener("DOMContentLoaded", route);
