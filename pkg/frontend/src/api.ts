// Thin typed client for the session service. Every mutating call echoes
// the version the caller last saw; the server resolves races with it.

import type { ActionRecord, GameStateView, Mode } from "./types.js";

export class ApiError extends Error {
  kind: string;
  detail: string;
  status: number;

  constructor(status: number, kind: string, detail: string) {
    super(`${kind}: ${detail}`);
    this.status = status;
    this.kind = kind;
    this.detail = detail;
  }
}

export interface CreatedGame {
  game_id: string;
  status: string;
  version: number;
  architect_key: string;
  builder_key: string;
  world_ref: string;
  target_ref: string | null;
}

export interface MutationResult {
  version: number;
  status: string;
  turn?: unknown;
  report?: {
    exact: boolean;
    translated_match: boolean;
    offset: [number, number];
    missing: number;
    extra: number;
  };
  clear?: boolean;
}

async function parseError(resp: Response): Promise<never> {
  let kind = "HttpError";
  let detail = `${resp.status}`;
  try {
    const body = (await resp.json()) as { error?: string; detail?: string };
    kind = body.error ?? kind;
    detail = body.detail ?? detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(resp.status, kind, detail);
}

export class Client {
  constructor(readonly base: string, private fetcher: typeof fetch = fetch) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetcher(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as T;
  }

  async createGame(mode: Mode, targetId?: string, seedWorldId?: string): Promise<CreatedGame> {
    return this.post<CreatedGame>("/games", {
      mode,
      target_id: targetId ?? null,
      seed_world_id: seedWorldId ?? null,
    });
  }

  async state(gameId: string, roleKey: string): Promise<GameStateView> {
    const resp = await this.fetcher(
      `${this.base}/games/${gameId}/state?role_key=${encodeURIComponent(roleKey)}`,
    );
    if (!resp.ok) await parseError(resp);
    return (await resp.json()) as GameStateView;
  }

  async postInstruction(
    gameId: string, roleKey: string, version: number, text: string,
  ): Promise<MutationResult> {
    return this.post(`/games/${gameId}/instruction`, { role_key: roleKey, version, text });
  }

  async postQuestion(
    gameId: string, roleKey: string, version: number, question: string,
  ): Promise<MutationResult> {
    return this.post(`/games/${gameId}/builder-turn`, { role_key: roleKey, version, question });
  }

  async postActions(
    gameId: string, roleKey: string, version: number, steps: ActionRecord[],
  ): Promise<MutationResult> {
    return this.post(`/games/${gameId}/builder-turn`, { role_key: roleKey, version, steps });
  }

  async markComplete(gameId: string, roleKey: string, version: number): Promise<MutationResult> {
    return this.post(`/games/${gameId}/complete`, { role_key: roleKey, version });
  }

  async postJudgment(
    gameId: string,
    roleKey: string,
    version: number,
    clear: boolean,
    question?: string,
    steps?: ActionRecord[],
  ): Promise<MutationResult> {
    return this.post(`/games/${gameId}/judgment`, {
      role_key: roleKey, version, clear,
      question: question ?? null,
      steps: steps ?? null,
    });
  }

  async exportCorpus(kind: "multi" | "single"): Promise<string> {
    const resp = await this.fetcher(`${this.base}/export/corpus?kind=${kind}`);
    if (!resp.ok) await parseError(resp);
    return resp.text();
  }
}
