import { Api } from "../src/api.js";
import { App } from "../src/app.js";
import { FakeServer } from "./fake-server.js";

export interface Mounted {
  app: App;
  fake: FakeServer;
  root: HTMLElement;
}

export async function mountApp(): Promise<Mounted> {
  const fake = new FakeServer();
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new App(root, new Api(fake.fetch));
  await app.init();
  return { app, fake, root };
}

/** deterministic PRNG so failures reproduce */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function pick<T>(rng: () => number, xs: readonly T[]): T {
  return xs[Math.floor(rng() * xs.length)];
}

/** Drain queued microtasks and any refresh they kicked off. */
export async function settle(app: App): Promise<void> {
  for (let i = 0; i < 5; i++) {
    await new Promise((resolve) => setTimeout(resolve));
    await app.refreshing;
  }
}
