import { readFileSync } from "node:fs";
import { join } from "node:path";
import { afterEach, describe, expect, it, vi } from "vitest";

import { createSession, stepSession } from "../src/api.js";
import { renderGraphSvg } from "../src/graphSvg.js";
import { applyStep, recommendedActions, startView } from "../src/session.js";
import type { CreatePayload, StepPayload } from "../src/types.js";

const fixture = (name: string) =>
  JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8"));

const createPayload: CreatePayload = { id: "s1", ...fixture("create_fix_a.json") };
const stepPayload: StepPayload = fixture("step_go_north.json");

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("session view", () => {
  it("starts from the create payload", () => {
    const view = startView(createPayload);
    expect(view.turns).toHaveLength(1);
    expect(view.turns[0].text).toContain("= Room A =");
    expect(recommendedActions(view)).toEqual(["go north"]);
    expect(view.done).toBe(false);
  });

  it("clicking the single recommended action advances the transcript and graph", async () => {
    // the walkthrough: one recommended button, whose click posts the same
    // step call as typing the command
    const fetchMock = vi.fn(async (url: RequestInfo | URL, init?: RequestInit) => {
      expect(String(url)).toBe("/api/sessions/s1/step");
      expect(JSON.parse(String(init?.body))).toEqual({ command: "go north" });
      return jsonResponse(stepPayload);
    });
    vi.stubGlobal("fetch", fetchMock);

    let view = startView(createPayload);
    const initialSvg = renderGraphSvg(view.lnn);
    expect(initialSvg).toMatch(/data-id="go\(north\)" data-truth="true"/);

    const [onlyAction] = recommendedActions(view);
    const payload = await stepSession(view.id, onlyAction);
    view = applyStep(view, onlyAction, payload);

    expect(view.turns).toHaveLength(2);
    expect(view.turns[1].command).toBe("go north");
    expect(view.turns[1].text).toContain("exits to the east and south");
    expect(recommendedActions(view)).toEqual(["go east"]);

    const svg = renderGraphSvg(view.lnn);
    expect(svg).toMatch(/data-id="go\(north\)" data-truth="unknown"/);
    expect(svg).toMatch(/data-id="go\(east\)" data-truth="true"/);
    expect(svg).not.toBe(initialSvg);
  });

  it("tracks score and done from step payloads", () => {
    let view = startView(createPayload);
    view = applyStep(view, "take coin", {
      ...stepPayload,
      observation: "You pick up the coin. Your score has just gone up by one point.",
      reward: 1,
      score: 1,
      done: true,
    });
    expect(view.score).toBe(1);
    expect(view.done).toBe(true);
    expect(view.turns[1].reward).toBe(1);
  });
});

describe("api client", () => {
  it("creates sessions against /api/sessions", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(createPayload));
    vi.stubGlobal("fetch", fetchMock);
    const payload = await createSession({
      game: "coin_collector", rulebook: "avoid_revisit", layout: "fix_a",
    });
    expect(payload.id).toBe("s1");
    expect(fetchMock).toHaveBeenCalledWith("/api/sessions", expect.objectContaining({
      method: "POST",
    }));
  });

  it("surfaces structured server errors", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(
      { error: { code: "session_done", message: "session is finished" } }, 409,
    )));
    await expect(stepSession("s1", "go north")).rejects.toThrow(
      "session_done: session is finished");
  });
});
