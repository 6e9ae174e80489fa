// Browser entry point. The page is addressed as
//   /?game=<id>&key=<role key>  (plus optional &poll=<ms>)
// and drives one session end to end against the hosting server.

import { Client } from "./api.js";
import { JudgmentRuleError, SessionFlow } from "./session.js";
import type { Color } from "./types.js";
import { COLORS } from "./types.js";
import { buildViewModel, renderIso, renderSlices } from "./view.js";

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function setText(id: string, text: string): void {
  el(id).textContent = text;
}

async function start(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const gameId = params.get("game");
  const roleKey = params.get("key");
  const pollMs = Number(params.get("poll") ?? "1500");
  if (!gameId || !roleKey) {
    setText("status-line", "missing ?game= and ?key= in the URL");
    return;
  }

  const client = new Client(window.location.origin);
  const flow = new SessionFlow(client, gameId, roleKey);
  let selectedColor: Color = "green";
  let breakMode = false;

  const palette = el<HTMLDivElement>("palette");
  for (const color of COLORS) {
    const button = document.createElement("button");
    button.className = `swatch c-${color}`;
    button.title = color;
    button.addEventListener("click", () => {
      selectedColor = color;
      breakMode = false;
      setText("tool-line", `placing ${color}`);
    });
    palette.appendChild(button);
  }
  el<HTMLButtonElement>("tool-break").addEventListener("click", () => {
    breakMode = true;
    setText("tool-line", "breaking blocks");
  });

  function redraw(): void {
    const state = flow.state;
    if (!state) return;
    setText(
      "status-line",
      `${state.mode} | ${state.status} | turn ${state.turn_index} | you are the ${state.role}`,
    );
    setText("warnings", state.warnings.join("; "));
    setText(
      "pending-line",
      flow.pending.length ? `${flow.pending.length} uncommitted edits` : "",
    );
    if (state.instruction) {
      setText("judged-instruction", `instruction: ${state.instruction}`);
    }

    const blocks = flow.localWorld.blocks();
    const agentPos: [number, number, number] = [
      flow.localAgent.x, flow.localAgent.y, flow.localAgent.z,
    ];
    const view = buildViewModel(blocks, agentPos);
    renderSlices(document, el("slices"), view, (level, x, z) => {
      const error = breakMode
        ? flow.breakAt(x, level, z)
        : flow.placeAt(x, level, z, selectedColor);
      setText("error-line", error ? `rejected: ${error}` : "");
      redraw();
    });
    const canvas = el<HTMLCanvasElement>("iso");
    const drawn = renderIso(canvas, blocks, agentPos);
    canvas.style.display = drawn ? "block" : "none";

    const mine =
      (state.role === "architect" && state.status === "awaiting_architect") ||
      (state.role === "builder" && state.status === "awaiting_builder");
    setText("turn-line", state.status === "complete" ? "session complete"
      : mine ? "your turn" : "waiting for the other side");

    const remaining = flow.remainingMs();
    if (remaining !== null) {
      flow.tick();
      setText("timer-line", flow.locked
        ? "time is up: commit your build"
        : `build time left: ${Math.ceil(remaining / 1000)}s`);
    }
  }

  async function act(run: () => Promise<void>): Promise<void> {
    try {
      await run();
      setText("error-line", flow.lastError ?? "");
    } catch (err) {
      if (err instanceof JudgmentRuleError) {
        setText("error-line", err.message);
      } else if (err instanceof Error) {
        setText("error-line", err.message);
      }
    }
    redraw();
  }

  el<HTMLButtonElement>("send-instruction").addEventListener("click", () =>
    act(async () => {
      await flow.instruct(el<HTMLTextAreaElement>("instruction-box").value);
      el<HTMLTextAreaElement>("instruction-box").value = "";
    }),
  );
  el<HTMLButtonElement>("send-question").addEventListener("click", () =>
    act(async () => {
      await flow.ask(el<HTMLTextAreaElement>("question-box").value);
      el<HTMLTextAreaElement>("question-box").value = "";
    }),
  );
  el<HTMLButtonElement>("commit-build").addEventListener("click", () =>
    act(() => flow.commit()),
  );
  el<HTMLButtonElement>("mark-complete").addEventListener("click", () =>
    act(() => flow.markComplete()),
  );
  el<HTMLButtonElement>("judge-clear").addEventListener("click", () =>
    act(() => flow.judge(true)),
  );
  el<HTMLButtonElement>("judge-unclear").addEventListener("click", () =>
    act(() => flow.judge(false, el<HTMLTextAreaElement>("question-box").value)),
  );
  el<HTMLButtonElement>("undo-edits").addEventListener("click", () => {
    flow.resetPending();
    redraw();
  });

  await flow.refresh();
  redraw();
  setInterval(async () => {
    const state = flow.state;
    const mine =
      state &&
      ((state.role === "architect" && state.status === "awaiting_architect") ||
        (state.role === "builder" && state.status === "awaiting_builder"));
    if (!mine && state && state.status !== "complete") {
      await flow.refresh();
    }
    redraw();
  }, pollMs);
}

start().catch((err) => setText("status-line", String(err)));
