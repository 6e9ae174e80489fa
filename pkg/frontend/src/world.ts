// Client-side mirror of the environment's action rules. Validation order
// and error names match the server exactly; the parity test suite holds
// this file to that contract, so the client never accepts an action the
// server would reject.

import type { ActionRecord, AgentPose, BlockTuple, Color, Facing } from "./types.js";
import { COLORS } from "./types.js";

export const SIZE_X = 11;
export const SIZE_Y = 9;
export const SIZE_Z = 11;
export const REACH = 3.0;

export type ActionErrorKind =
  | "OutOfBounds"
  | "CellOccupied"
  | "CellEmpty"
  | "OutOfReach"
  | "Unsupported";

const DIRECTION_DELTAS: Record<Facing, [number, number]> = {
  N: [0, -1],
  S: [0, 1],
  E: [1, 0],
  W: [-1, 0],
};

const FACE_NEIGHBORS: Array<[number, number, number]> = [
  [1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1],
];

export class World {
  // 0 = empty, 1..6 = COLORS index + 1
  cells: Uint8Array;

  constructor(cells?: Uint8Array) {
    this.cells = cells ? cells.slice() : new Uint8Array(SIZE_X * SIZE_Y * SIZE_Z);
  }

  static fromBlocks(blocks: BlockTuple[]): World {
    const world = new World();
    for (const [x, y, z, color] of blocks) {
      world.set(x, y, z, color);
    }
    return world;
  }

  private index(x: number, y: number, z: number): number {
    return (x * SIZE_Y + y) * SIZE_Z + z;
  }

  get(x: number, y: number, z: number): Color | null {
    const code = this.cells[this.index(x, y, z)];
    return code === 0 ? null : COLORS[code - 1];
  }

  isEmpty(x: number, y: number, z: number): boolean {
    return this.cells[this.index(x, y, z)] === 0;
  }

  set(x: number, y: number, z: number, color: Color | null): void {
    this.cells[this.index(x, y, z)] = color === null ? 0 : COLORS.indexOf(color) + 1;
  }

  blocks(): BlockTuple[] {
    const out: BlockTuple[] = [];
    for (let x = 0; x < SIZE_X; x++) {
      for (let y = 0; y < SIZE_Y; y++) {
        for (let z = 0; z < SIZE_Z; z++) {
          const color = this.get(x, y, z);
          if (color !== null) out.push([x, y, z, color]);
        }
      }
    }
    return out;
  }

  blockCount(): number {
    let n = 0;
    for (const c of this.cells) if (c !== 0) n++;
    return n;
  }

  copy(): World {
    return new World(this.cells);
  }
}

export interface Agent {
  x: number;
  y: number;
  z: number;
  facing: Facing;
  jumpPending: boolean;
}

export function agentFromPose(pose: AgentPose): Agent {
  return {
    x: pose.pos[0], y: pose.pos[1], z: pose.pos[2],
    facing: pose.facing, jumpPending: pose.jump,
  };
}

function inBounds(x: number, y: number, z: number): boolean {
  return x >= 0 && x < SIZE_X && y >= 0 && y < SIZE_Y && z >= 0 && z < SIZE_Z;
}

function hasFaceNeighbor(world: World, x: number, y: number, z: number): boolean {
  for (const [dx, dy, dz] of FACE_NEIGHBORS) {
    const nx = x + dx, ny = y + dy, nz = z + dz;
    if (inBounds(nx, ny, nz) && !world.isEmpty(nx, ny, nz)) return true;
  }
  return false;
}

function distance(ax: number, ay: number, az: number, bx: number, by: number, bz: number): number {
  return Math.sqrt((ax - bx) ** 2 + (ay - by) ** 2 + (az - bz) ** 2);
}

/** Validation result: null when the action is legal, the rule name otherwise. */
export function validateAction(
  world: World,
  agent: Agent,
  action: ActionRecord,
  freePlacement = false,
): ActionErrorKind | null {
  const originY = agent.jumpPending ? agent.y + 1 : agent.y;

  if (action.kind === "place") {
    const [x, y, z] = action.pos;
    if (!inBounds(x, y, z)) return "OutOfBounds";
    if (x === agent.x && y === agent.y && z === agent.z) return "CellOccupied";
    if (!world.isEmpty(x, y, z)) return "CellOccupied";
    if (distance(agent.x, originY, agent.z, x, y, z) > REACH) return "OutOfReach";
    if (!freePlacement && y > 0 && !hasFaceNeighbor(world, x, y, z)) return "Unsupported";
    return null;
  }

  if (action.kind === "break") {
    const [x, y, z] = action.pos;
    if (!inBounds(x, y, z)) return "OutOfBounds";
    if (world.isEmpty(x, y, z)) return "CellEmpty";
    if (distance(agent.x, originY, agent.z, x, y, z) > REACH) return "OutOfReach";
    if (agent.y > 0 && x === agent.x && y === agent.y - 1 && z === agent.z) return "Unsupported";
    return null;
  }

  if (action.kind === "move") {
    const [dx, dz] = DIRECTION_DELTAS[action.dir];
    const tx = agent.x + dx, tz = agent.z + dz;
    if (tx < 0 || tx >= SIZE_X || tz < 0 || tz >= SIZE_Z) return "OutOfBounds";
    if (world.isEmpty(tx, agent.y, tz)) {
      const supported = agent.y === 0 || !world.isEmpty(tx, agent.y - 1, tz);
      return supported ? null : "Unsupported";
    }
    const upY = agent.y + 1;
    if (upY >= SIZE_Y) return "OutOfBounds";
    if (!world.isEmpty(tx, upY, tz)) return "CellOccupied";
    return null;
  }

  return null; // jump is always legal
}

/** Apply a validated action; throws Error(kind) when illegal. */
export function applyAction(
  world: World,
  agent: Agent,
  action: ActionRecord,
  freePlacement = false,
): { world: World; agent: Agent } {
  const error = validateAction(world, agent, action, freePlacement);
  if (error !== null) throw new Error(error);

  if (action.kind === "place") {
    const next = world.copy();
    next.set(action.pos[0], action.pos[1], action.pos[2], action.color);
    return { world: next, agent: { ...agent, jumpPending: false } };
  }
  if (action.kind === "break") {
    const next = world.copy();
    next.set(action.pos[0], action.pos[1], action.pos[2], null);
    return { world: next, agent: { ...agent, jumpPending: false } };
  }
  if (action.kind === "move") {
    const [dx, dz] = DIRECTION_DELTAS[action.dir];
    const tx = agent.x + dx, tz = agent.z + dz;
    const y = world.isEmpty(tx, agent.y, tz) ? agent.y : agent.y + 1;
    return {
      world,
      agent: { x: tx, y, z: tz, facing: action.dir, jumpPending: false },
    };
  }
  return { world, agent: { ...agent, jumpPending: true } };
}
