/**
 * Spawns the real inference service for the integration test.
 *
 * When ROOMFIT_SERVICE_URL is already set, that service is used as-is.
 * Otherwise this trains a tiny throwaway checkpoint (cached under
 * .cache/), starts `roomfit serve` on a free port, and tears it down
 * after the run. If the Python package is not importable the integration
 * test is skipped.
 */

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import * as http from "node:http";
import { existsSync, mkdirSync } from "node:fs";
import { createServer } from "node:net";
import * as path from "node:path";

let child: ChildProcess | null = null;

const PYTHON = process.env.ROOMFIT_PYTHON ?? "python3";
const REPO_ROOT = path.resolve(__dirname, "..", "..");
const CACHE = path.resolve(__dirname, "..", ".cache");
const CKPT = path.join(CACHE, "ui-smoke-v2.ckpt");
const FIXTURES = path.join(CACHE, "fixtures");

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const address = srv.address();
      if (address && typeof address === "object") {
        const port = address.port;
        srv.close(() => resolve(port));
      } else {
        srv.close(() => reject(new Error("no port")));
      }
    });
  });
}

function healthStatus(url: string): Promise<number> {
  // plain node:http with no agent, so no keep-alive socket outlives the run
  return new Promise((resolve, reject) => {
    const req = http.get(`${url}/healthz`, { agent: false }, (res) => {
      res.resume();
      resolve(res.statusCode ?? 0);
    });
    req.on("error", reject);
  });
}

async function waitHealthy(url: string, timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      if ((await healthStatus(url)) === 200) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) throw new Error(`service at ${url} never became healthy`);
    await new Promise((r) => setTimeout(r, 300));
  }
}

export default async function setup(): Promise<void> {
  if (process.env.ROOMFIT_SERVICE_URL) return;

  const probe = spawnSync(PYTHON, ["-c", "import roomfit"], { cwd: REPO_ROOT });
  if (probe.status !== 0) {
    console.warn("roomfit is not importable; integration test will be skipped");
    return;
  }

  mkdirSync(CACHE, { recursive: true });
  if (!existsSync(CKPT) || !existsSync(FIXTURES)) {
    console.log("training a tiny checkpoint for the UI integration test...");
    const trained = spawnSync(
      PYTHON,
      [
        "-m", "roomfit.cli", "train",
        "--fixture", "8", "--seed", "12", "--steps", "400",
        "--batch", "8", "--lr", "1e-3", "--image-size", "32", "--slots", "8",
        "--out", CKPT,
      ],
      { cwd: REPO_ROOT, stdio: "inherit" },
    );
    if (trained.status !== 0) throw new Error("checkpoint training failed");
    const saved = spawnSync(
      PYTHON,
      [
        "-c",
        "from roomfit.dataset import make_fixture_corpus, save_corpus; " +
          `save_corpus(make_fixture_corpus(8, seed=12), r'${FIXTURES}')`,
      ],
      { cwd: REPO_ROOT, stdio: "inherit" },
    );
    if (saved.status !== 0) throw new Error("fixture corpus generation failed");
  }

  const port = await freePort();
  child = spawn(
    PYTHON,
    [
      "-m", "roomfit.cli", "serve",
      "--ckpt", CKPT, "--fixtures", FIXTURES, "--port", String(port),
    ],
    { cwd: REPO_ROOT, stdio: "ignore", env: { ...process.env, LOG_LEVEL: "warning" } },
  );
  child.unref();
  const url = `http://127.0.0.1:${port}`;
  await waitHealthy(url, 60_000);
  process.env.ROOMFIT_SERVICE_URL = url;
  process.env.ROOMFIT_SERVICE_SPAWNED = "1";
}

export async function teardown(): Promise<void> {
  if (child && !child.killed) {
    child.kill("SIGTERM");
    await new Promise<void>((resolve) => {
      const timer = setTimeout(() => {
        child?.kill("SIGKILL");
        resolve();
      }, 5000);
      child?.once("exit", () => {
        clearTimeout(timer);
        resolve();
      });
    });
  }
}
