// Session view state: a pure reducer over server payloads. The UI renders
// this state and nothing else, so any display is reproducible by replaying
// the same HTTP responses.

import type { CreatePayload, LnnSnapshot, Recommendation, StepPayload } from "./types.js";

export interface Turn {
  text: string;
  command?: string;
  reward?: number;
  score: number;
}

export interface SessionView {
  id: string;
  game: string;
  rulebook: string;
  turns: Turn[];
  recommendations: Recommendation[];
  lnn: LnnSnapshot;
  score: number;
  done: boolean;
}

export function startView(payload: CreatePayload): SessionView {
  return {
    id: payload.id,
    game: payload.game,
    rulebook: payload.rulebook,
    turns: [{ text: payload.observation, score: payload.score }],
    recommendations: payload.recommendations,
    lnn: payload.lnn,
    score: payload.score,
    done: payload.done,
  };
}

export function applyStep(view: SessionView, command: string, payload: StepPayload): SessionView {
  return {
    ...view,
    turns: [
      ...view.turns,
      { text: payload.observation, command, reward: payload.reward, score: payload.score },
    ],
    recommendations: payload.recommendations,
    lnn: payload.lnn,
    score: payload.score,
    done: payload.done,
  };
}

export function recommendedActions(view: SessionView): string[] {
  return view.recommendations.filter((r) => r.recommended).map((r) => r.action);
}
