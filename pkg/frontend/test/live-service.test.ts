// Contract parity against a live backend. Skipped unless SERVICE_URL points
// at a running service (see package.json "test:live"); the same scripted
// session that runs against the stub must complete against the real thing.

import { describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { SessionFlow } from "../src/flow.js";

const serviceUrl = process.env.SERVICE_URL;

describe.skipIf(!serviceUrl)("live service", () => {
  it("runs a full scripted session and follows the server plan", async () => {
    const api = new SessionApi(serviceUrl!, (input, init) => fetch(input, init));
    const flow = new SessionFlow(api);
    await flow.create(0, 123, `live-${Date.now()}`);
    const planned = flow.plannedOrder();
    expect(planned).toHaveLength(20);

    let guard = 0;
    while (flow.phase !== "done") {
      if (++guard > 200) throw new Error("session never completed");
      if (flow.phase === "idle") await flow.advance();
      else if (flow.phase === "awaiting-sam") await flow.submitSam(5, 5);
      else if (flow.phase === "awaiting-ios") await flow.submitIos(4);
    }
    expect(flow.displayedOrder).toEqual(planned);
    expect(flow.state!.trials_done).toBe(20);
    expect(flow.state!.ios_done).toBe(2);
  });

  it("replays a nonce idempotently", async () => {
    const api = new SessionApi(serviceUrl!, (input, init) => fetch(input, init));
    const flow = new SessionFlow(api);
    await flow.create(1, 99, `live-nonce-${Date.now()}`);
    await flow.advance();
    const first = await api.submitSam(flow.sessionId!, 4, 6, "live-nonce");
    const replay = await api.submitSam(flow.sessionId!, 4, 6, "live-nonce");
    expect(replay).toEqual(first);
    expect(first.trials_done).toBe(1);
  });
});
