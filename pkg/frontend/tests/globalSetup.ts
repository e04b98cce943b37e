/** Build a fixture snapshot with the real pipeline and serve it for the
 * duration of the test run. Tests are true headless clients: they talk HTTP
 * to the same service a browser would. Requires the Python package from the
 * repository root to be installed (pip install -e ..).
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import type { GlobalSetupContext } from "vitest/node";

const PYTHON = process.env.TERMEX_PYTHON ?? "python3";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        reject(new Error("could not allocate a port"));
      }
    });
  });
}

function termex(...args: string[]): void {
  execFileSync(PYTHON, ["-m", "termex", ...args], { stdio: "pipe" });
}

async function waitForService(base: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 60_000;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`service exited with code ${child.exitCode}`);
    }
    try {
      const response = await fetch(`${base}/api/corpora`);
      if (response.ok) return;
    } catch (error) {
      lastError = error;
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error(`service never came up: ${lastError}`);
}

let child: ChildProcess | null = null;

export default async function setup({ provide }: GlobalSetupContext): Promise<() => void> {
  const root = mkdtempSync(join(tmpdir(), "termex-ui-"));
  const fx = join(root, "fx");
  const ws = join(root, "ws");

  termex("fixture", "--out", fx, "--seed", "13");
  const summary = JSON.parse(readFileSync(join(fx, "fixture.json"), "utf-8")) as {
    corpus_ids: string[];
    replicates: Record<string, string[]>;
  };
  summary.corpus_ids.forEach((corpusId, order) => {
    const files = summary.replicates[corpusId].map((rel) => join(fx, rel));
    termex(
      "ingest",
      "--workspace", ws,
      "--corpus", corpusId,
      "--label", `Corpus ${order + 1}`,
      "--order", String(order),
      "--terminology", join(fx, "terminology.tsv"),
      ...files,
    );
  });
  termex("compute", "--workspace", ws);

  const port = await freePort();
  const base = `http://127.0.0.1:${port}`;
  child = spawn(
    PYTHON,
    ["-m", "termex", "serve", "--snapshot", join(ws, "snapshot"), "--port", String(port)],
    { stdio: ["ignore", "pipe", "pipe"] },
  );
  await waitForService(base, child);
  provide("baseUrl", base);

  return () => {
    child?.kill("SIGINT");
  };
}

declare module "vitest" {
  export interface ProvidedContext {
    baseUrl: string;
  }
}
