import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { createInterface } from "node:readline";

export interface ServerHandle {
  base: string;
  targetId: string;
  emptyWorldId: string;
  dataDir: string;
  proc: ChildProcess;
  stop(): void;
}

const PYTHON = process.env.BLOCKTALK_PYTHON ?? "python3";

/** Spawn the session service with a demo target; resolves once it listens. */
export function startServer(): Promise<ServerHandle> {
  const dataDir = mkdtempSync(join(tmpdir(), "blocktalk-web-"));
  const proc = spawn(
    PYTHON,
    ["-u", "-m", "blocktalk.cli", "serve", "--port", "0", "--data-dir", dataDir, "--seed-demo"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );

  return new Promise((resolve, reject) => {
    let targetId = "";
    let emptyWorldId = "";
    const timer = setTimeout(
      () => reject(new Error("server did not start within 30s")),
      30_000,
    );
    const lines = createInterface({ input: proc.stdout! });
    lines.on("line", (line) => {
      if (line.startsWith("{")) {
        const seeded = JSON.parse(line) as { target_id: string; empty_world_id: string };
        targetId = seeded.target_id;
        emptyWorldId = seeded.empty_world_id;
        return;
      }
      const match = line.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve({
          base: match[1],
          targetId,
          emptyWorldId,
          dataDir,
          proc,
          stop: () => proc.kill("SIGTERM"),
        });
      }
    });
    proc.stderr!.on("data", () => { /* request logging is quiet; ignore */ });
    proc.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`server exited early with code ${code}`));
    });
  });
}

/** Run a blocktalk CLI command; resolves with {code, stdout, stderr}. */
export function runCli(args: string[]): Promise<{ code: number; stdout: string; stderr: string }> {
  return new Promise((resolve) => {
    const proc = spawn(PYTHON, ["-m", "blocktalk.cli", ...args], {
      stdio: ["ignore", "pipe", "pipe"],
    });
    let stdout = "";
    let stderr = "";
    proc.stdout!.on("data", (chunk) => (stdout += chunk));
    proc.stderr!.on("data", (chunk) => (stderr += chunk));
    proc.on("close", (code) => resolve({ code: code ?? -1, stdout, stderr }));
  });
}
