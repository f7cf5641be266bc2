import type { CreatePayload, GameInfo, StepPayload } from "./types.js";

const API_BASE = "/api";

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(`${API_BASE}${path}`, init);
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const message = body?.error?.message ?? `HTTP ${response.status}`;
    const code = body?.error?.code ?? "http_error";
    throw new Error(`${code}: ${message}`);
  }
  return body as T;
}

export async function listGames(): Promise<GameInfo[]> {
  const body = await request<{ games: GameInfo[] }>("/games");
  return body.games;
}

export function createSession(options: {
  game: string;
  rulebook: string;
  layout?: string;
  chain_length?: number;
  branches?: number;
  seed?: number;
}): Promise<CreatePayload> {
  return request<CreatePayload>("/sessions", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(options),
  });
}

export function stepSession(id: string, command: string): Promise<StepPayload> {
  return request<StepPayload>(`/sessions/${id}/step`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ command }),
  });
}
