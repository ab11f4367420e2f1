import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

export interface LiveServer {
  baseUrl: string;
  dataDir: string;
  stop: () => void;
}

/**
 * Build the fixture world and host it with the real Python service.
 * The reward window is shortened via env override so the Expired path
 * is testable without waiting out the production 600 seconds.
 */
export async function startFixtureServer(port: number, rewardWaitSeconds = 5): Promise<LiveServer> {
  const dataDir = mkdtempSync(join(tmpdir(), 'bidimatch-ui-'));
  const seeded = spawnSync('python3', [join(__dirname, 'make_fixture_world.py'), dataDir], {
    encoding: 'utf8',
  });
  if (seeded.status !== 0) {
    throw new Error(`fixture world generation failed: ${seeded.stderr}`);
  }
  const child: ChildProcess = spawn(
    'bidimatch',
    ['serve', '--data-dir', dataDir, '--port', String(port), '--host', '127.0.0.1'],
    {
      env: { ...process.env, BIDI_REWARD_WAIT_SECONDS: String(rewardWaitSeconds) },
      stdio: ['ignore', 'pipe', 'pipe'],
    },
  );
  const baseUrl = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 30_000;
  for (;;) {
    try {
      const response = await fetch(`${baseUrl}/health`);
      if (response.ok) {
        break;
      }
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error('server did not become healthy in time');
    }
    await sleep(150);
  }
  return {
    baseUrl,
    dataDir,
    stop: () => {
      child.kill('SIGTERM');
    },
  };
}

export function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Read the model's append-only event log; last line per event id wins. */
export function readEventLog(dataDir: string, model: 'traveler_model' | 'job_model'): Map<string, any> {
  const text = readFileSync(join(dataDir, `events-${model}.jsonl`), 'utf8');
  const events = new Map<string, any>();
  for (const line of text.split('\n')) {
    if (!line.trim()) {
      continue;
    }
    const record = JSON.parse(line);
    events.set(record.event_id, record);
  }
  return events;
}
