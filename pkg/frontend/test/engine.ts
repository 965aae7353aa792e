// Spawns the real engine service (HTTP mode) for end-to-end tests.

import { ChildProcess, execFileSync, spawn } from "node:child_process";

export interface Engine {
  endpoint: string;
  worldPath(name: string): string;
  stop(): void;
}

const PYTHON = process.env.INTENTLANG_PYTHON ?? "python3";

export function dataPath(name: string): string {
  return execFileSync(
    PYTHON,
    ["-c", `import intentlang; print(intentlang.data_path(${JSON.stringify(name)}))`],
    { encoding: "utf-8" },
  ).trim();
}

export async function startEngine(): Promise<Engine> {
  const child: ChildProcess = spawn(
    PYTHON,
    ["-m", "intentlang.cli", "serve", "--http", "--listen", "127.0.0.1:0"],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  const endpoint = await new Promise<string>((resolve, reject) => {
    let buffer = "";
    const timer = setTimeout(
      () => reject(new Error("engine did not start in time")),
      15000,
    );
    child.stdout!.on("data", (chunk: Buffer) => {
      buffer += chunk.toString();
      const match = buffer.match(/listening on ([\d.]+):(\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(`http://${match[1]}:${match[2]}/`);
      }
    });
    child.stderr!.on("data", () => {});
    child.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`engine exited early with code ${code}`));
    });
  });
  return {
    endpoint,
    worldPath: dataPath,
    stop: () => {
      child.kill("SIGTERM");
    },
  };
}

export function cliTranscript(world: string, commands: string[]): string[] {
  const stdout = execFileSync(
    PYTHON,
    ["-m", "intentlang.cli", "play", "--world", world, "--seed", "0"],
    { encoding: "utf-8", input: commands.join("\n") + "\n:quit\n" },
  );
  return stdout
    .split("\n")
    .filter((line) => line.startsWith("ok: ") || line.startsWith("fail: "));
}
