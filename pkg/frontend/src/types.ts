// Wire types mirroring the server's JSON schemas. The UI never computes
// logic locally; everything rendered comes from these payloads.

export type Truth = "true" | "false" | "unknown" | "contradiction";

export interface LnnNode {
  id: string;
  kind: "proposition" | "and" | "or" | "not" | "implies";
  label: string;
  lower: number;
  upper: number;
  beta: number;
  asserted: boolean;
  truth: Truth;
}

export interface LnnEdge {
  parent: string;
  child: string;
  weight: number;
}

export interface LnnSnapshot {
  nodes: LnnNode[];
  edges: LnnEdge[];
  actions: string[];
}

export interface Recommendation {
  action: string;
  lower: number;
  upper: number;
  recommended: boolean;
}

export interface GameInfo {
  id: string;
  name: string;
  rulebooks: string[];
  layouts: string[];
}

export interface CreatePayload {
  id: string;
  game: string;
  rulebook: string;
  observation: string;
  score: number;
  done: boolean;
  facts: string[];
  recommendations: Recommendation[];
  lnn: LnnSnapshot;
}

export interface StepPayload {
  observation: string;
  reward: number;
  score: number;
  done: boolean;
  recommendations: Recommendation[];
  lnn: LnnSnapshot;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
