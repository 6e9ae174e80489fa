// Session flow: keeps the server snapshot, a queue of locally validated
// pending edits, and the one-minute build countdown. Every mutation goes
// through the service with the last seen version; stale-version conflicts
// refresh the snapshot and surface the server's error text verbatim.

import { ApiError, Client } from "./api.js";
import type { ActionRecord, Color, Facing, GameStateView } from "./types.js";
import {
  Agent,
  ActionErrorKind,
  World,
  agentFromPose,
  applyAction,
  validateAction,
} from "./world.js";

export const BUILD_WINDOW_MS = 60_000;

export type EditAction =
  | { kind: "place"; pos: [number, number, number]; color: Color }
  | { kind: "break"; pos: [number, number, number] }
  | { kind: "move"; dir: Facing }
  | { kind: "jump" };

export class JudgmentRuleError extends Error {
  // thrown client-side, before any request leaves the browser
  constructor(message: string) {
    super(message);
    this.name = "JudgmentRuleError";
  }
}

export interface FlowOptions {
  now?: () => number;
  buildWindowMs?: number;
}

export class SessionFlow {
  state: GameStateView | null = null;
  pending: ActionRecord[] = [];
  localWorld: World = new World();
  localAgent: Agent = { x: 5, y: 0, z: 5, facing: "N", jumpPending: false };
  buildDeadline: number | null = null;
  locked = false;
  lastError: string | null = null;

  private now: () => number;
  private windowMs: number;

  constructor(
    readonly client: Client,
    readonly gameId: string,
    readonly roleKey: string,
    options: FlowOptions = {},
  ) {
    this.now = options.now ?? Date.now;
    this.windowMs = options.buildWindowMs ?? BUILD_WINDOW_MS;
  }

  get version(): number {
    return this.state?.version ?? 0;
  }

  async refresh(): Promise<GameStateView> {
    const state = await this.client.state(this.gameId, this.roleKey);
    const worldChanged =
      this.state === null || state.world_version !== this.state.world_version;
    this.state = state;
    if (worldChanged) {
      this.resetPending();
    }
    if (
      state.mode === "single_turn_build" &&
      state.role === "builder" &&
      state.status === "awaiting_builder" &&
      this.buildDeadline === null
    ) {
      this.buildDeadline = this.now() + this.windowMs;
    }
    return state;
  }

  resetPending(): void {
    this.pending = [];
    if (this.state) {
      this.localWorld = World.fromBlocks(this.state.world);
      this.localAgent = agentFromPose(this.state.agent);
    }
  }

  /** Countdown remaining; only meaningful in single_turn_build. */
  remainingMs(): number | null {
    if (this.buildDeadline === null) return null;
    return Math.max(0, this.buildDeadline - this.now());
  }

  /** Re-evaluate the countdown; past the deadline the editor locks. */
  tick(): void {
    const remaining = this.remainingMs();
    if (remaining !== null && remaining <= 0) {
      this.locked = true;
    }
  }

  /**
   * Validate one edit against the locally replayed state and queue it.
   * Returns the violated rule name (identical to the server's) or null.
   */
  tryEdit(action: EditAction): ActionErrorKind | "EditorLocked" | null {
    this.tick();
    if (this.locked) return "EditorLocked";
    const lastT = this.pending.length ? this.pending[this.pending.length - 1].t : 0;
    const record = { ...action, t: Math.max(lastT, this.pending.length) } as ActionRecord;
    const error = validateAction(this.localWorld, this.localAgent, record);
    if (error !== null) return error;
    const applied = applyAction(this.localWorld, this.localAgent, record);
    this.localWorld = applied.world;
    this.localAgent = applied.agent;
    this.pending.push(record);
    return null;
  }

  placeAt(x: number, y: number, z: number, color: Color) {
    return this.tryEdit({ kind: "place", pos: [x, y, z], color });
  }

  breakAt(x: number, y: number, z: number) {
    return this.tryEdit({ kind: "break", pos: [x, y, z] });
  }

  move(dir: Facing) {
    return this.tryEdit({ kind: "move", dir });
  }

  jump() {
    return this.tryEdit({ kind: "jump" });
  }

  /** Commit queued edits as one builder turn. */
  async commit(): Promise<void> {
    if (!this.pending.length) {
      throw new JudgmentRuleError("nothing to commit: make some edits first");
    }
    await this.mutate(() =>
      this.client.postActions(this.gameId, this.roleKey, this.version, this.pending),
    );
  }

  async ask(question: string): Promise<void> {
    await this.mutate(() =>
      this.client.postQuestion(this.gameId, this.roleKey, this.version, question),
    );
  }

  async instruct(text: string): Promise<void> {
    await this.mutate(() =>
      this.client.postInstruction(this.gameId, this.roleKey, this.version, text),
    );
  }

  async markComplete(): Promise<void> {
    await this.mutate(() =>
      this.client.markComplete(this.gameId, this.roleKey, this.version),
    );
  }

  /**
   * Submit a single-turn judgment. The collection rule is enforced before
   * any request: an unclear judgment must carry a question, a clear one
   * must carry the rebuild edits.
   */
  async judge(clear: boolean, question?: string): Promise<void> {
    if (!clear && !(question ?? "").trim()) {
      throw new JudgmentRuleError(
        "an instruction marked not clear must be accompanied by at least one clarifying question",
      );
    }
    if (clear && this.pending.length === 0) {
      throw new JudgmentRuleError("a clear judgment needs the rebuilt actions: build first");
    }
    await this.mutate(() =>
      this.client.postJudgment(
        this.gameId,
        this.roleKey,
        this.version,
        clear,
        clear ? undefined : question,
        clear ? this.pending : undefined,
      ),
    );
  }

  private async mutate(call: () => Promise<unknown>): Promise<void> {
    this.lastError = null;
    try {
      await call();
    } catch (err) {
      if (err instanceof ApiError) {
        this.lastError = `${err.kind}: ${err.detail}`;
        if (err.kind === "StaleVersion" || err.kind === "WrongTurn") {
          await this.refresh(); // someone else moved first; resync
        }
        throw err;
      }
      throw err;
    }
    await this.refresh();
  }
}
