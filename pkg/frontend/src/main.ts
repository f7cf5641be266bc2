// DOM wiring: game selector, transcript + command input with one-click
// recommendation buttons, and the live logic-graph pane. One in-flight step
// per session; input stays disabled while a request runs and when the game
// is over.

import { createSession, listGames, stepSession } from "./api.js";
import { renderGraphSvg } from "./graphSvg.js";
import { applyStep, recommendedActions, startView, type SessionView } from "./session.js";
import type { GameInfo } from "./types.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let view: SessionView | null = null;
let busy = false;

function setBanner(message: string | null): void {
  const banner = $("error-banner");
  banner.textContent = message ?? "";
  banner.style.display = message ? "block" : "none";
}

function renderTranscript(): void {
  if (!view) return;
  const pane = $("transcript");
  pane.innerHTML = "";
  for (const turn of view.turns) {
    if (turn.command !== undefined) {
      const cmd = document.createElement("div");
      cmd.className = "turn-command";
      cmd.textContent = `> ${turn.command}`;
      pane.appendChild(cmd);
    }
    const obs = document.createElement("pre");
    obs.className = "turn-obs";
    obs.textContent = turn.text;
    pane.appendChild(obs);
    if (turn.reward !== undefined) {
      const meta = document.createElement("div");
      meta.className = "turn-meta";
      meta.textContent = `reward ${turn.reward}  score ${turn.score}`;
      pane.appendChild(meta);
    }
  }
  pane.scrollTop = pane.scrollHeight;
}

function renderRecommendations(): void {
  if (!view) return;
  const box = $("recommendations");
  box.innerHTML = "";
  for (const rec of view.recommendations) {
    const btn = document.createElement("button");
    btn.className = rec.recommended ? "rec recommended" : "rec";
    btn.textContent = `${rec.action}  [${rec.lower.toFixed(2)}, ${rec.upper.toFixed(2)}]`;
    btn.disabled = !rec.recommended || view.done || busy;
    btn.onclick = () => void submit(rec.action);
    box.appendChild(btn);
  }
}

function renderGraph(): void {
  if (!view) return;
  $("graph-pane").innerHTML = renderGraphSvg(view.lnn);
}

function renderAll(): void {
  renderTranscript();
  renderRecommendations();
  renderGraph();
  const input = $<HTMLInputElement>("command-input");
  const send = $<HTMLButtonElement>("send-button");
  const disabled = !view || view.done || busy;
  input.disabled = disabled;
  send.disabled = disabled;
  $("status").textContent = view?.done
    ? `game over, score ${view.score}`
    : view ? `score ${view.score}` : "no session";
}

async function submit(command: string): Promise<void> {
  if (!view || view.done || busy) return;
  busy = true;
  renderAll();
  try {
    const payload = await stepSession(view.id, command);
    view = applyStep(view, command, payload);
    setBanner(null);
  } catch (err) {
    setBanner(String(err));
  } finally {
    busy = false;
    renderAll();
  }
}

async function start(): Promise<void> {
  const game = $<HTMLSelectElement>("game-select").value;
  const rulebook = $<HTMLSelectElement>("rulebook-select").value;
  const layout = $<HTMLSelectElement>("layout-select").value;
  const seed = Number($<HTMLInputElement>("seed-input").value || "0");
  busy = true;
  try {
    const options: Parameters<typeof createSession>[0] = { game, rulebook };
    if (layout === "fix_a") {
      options.layout = "fix_a";
    } else {
      options.chain_length = 5;
      options.branches = 2;
      options.seed = seed;
    }
    const payload = await createSession(options);
    view = startView(payload);
    setBanner(null);
  } catch (err) {
    view = null;
    setBanner(String(err));
  } finally {
    busy = false;
    renderAll();
  }
}

function fillSelectors(games: GameInfo[]): void {
  const gameSelect = $<HTMLSelectElement>("game-select");
  const rulebookSelect = $<HTMLSelectElement>("rulebook-select");
  gameSelect.innerHTML = "";
  for (const info of games) {
    const opt = document.createElement("option");
    opt.value = info.id;
    opt.textContent = info.name;
    gameSelect.appendChild(opt);
  }
  const refreshRulebooks = () => {
    const info = games.find((g) => g.id === gameSelect.value);
    rulebookSelect.innerHTML = "";
    for (const rb of info?.rulebooks ?? []) {
      const opt = document.createElement("option");
      opt.value = rb;
      opt.textContent = rb;
      rulebookSelect.appendChild(opt);
    }
  };
  gameSelect.onchange = refreshRulebooks;
  refreshRulebooks();
  $<HTMLButtonElement>("start-button").disabled = games.length === 0;
}

async function init(): Promise<void> {
  $<HTMLButtonElement>("start-button").onclick = () => void start();
  $<HTMLButtonElement>("send-button").onclick = () => {
    const input = $<HTMLInputElement>("command-input");
    const text = input.value.trim();
    if (text) {
      input.value = "";
      void submit(text);
    }
  };
  $<HTMLInputElement>("command-input").addEventListener("keydown", (ev) => {
    if (ev.key === "Enter") $<HTMLButtonElement>("send-button").click();
  });
  try {
    fillSelectors(await listGames());
  } catch (err) {
    setBanner(String(err));
    $<HTMLButtonElement>("start-button").disabled = true;
  }
  renderAll();
}

void init();
