export type Color = "blue" | "green" | "red" | "orange" | "purple" | "yellow";

export const COLORS: Color[] = ["blue", "green", "red", "orange", "purple", "yellow"];

export type BlockTuple = [number, number, number, Color];

export type Facing = "N" | "S" | "E" | "W";

export interface AgentPose {
  pos: [number, number, number];
  facing: Facing;
  jump: boolean;
}

export type ActionRecord =
  | { t: number; kind: "place"; pos: [number, number, number]; color: Color }
  | { t: number; kind: "break"; pos: [number, number, number] }
  | { t: number; kind: "move"; dir: Facing }
  | { t: number; kind: "jump" };

export interface TurnRow {
  game_id: string;
  turn_index: number;
  role: "architect" | "builder";
  utterance: string;
  log_ref: string | null;
  world_ref: string | null;
  is_question: boolean;
  t: number;
}

export type Mode = "multi_turn" | "single_turn_build" | "single_turn_judge";
export type Status = "awaiting_architect" | "awaiting_builder" | "complete";

export interface GameStateView {
  game_id: string;
  mode: Mode;
  status: Status;
  version: number;
  turn_index: number;
  world_version: number;
  role: "architect" | "builder";
  world: BlockTuple[];
  agent: AgentPose;
  target: BlockTuple[] | null;
  turns: TurnRow[];
  warnings: string[];
  instruction: string | null;
}
