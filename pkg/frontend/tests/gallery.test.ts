import { beforeEach, describe, expect, it, vi } from "vitest";

import { Gallery, parseCandidates } from "../src/app";

const CARDS = [
  { id: 0, seed: 5, points: 300, tour_length_px: 3488.4, est_time_min: 4.6 },
  { id: 1, seed: 6, points: 300, tour_length_px: 3453.5, est_time_min: 4.6 },
  { id: 2, seed: 7, points: 300, tour_length_px: 3519.1, est_time_min: 4.6 },
];

const SVG = (id: number) =>
  `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 10 10"><path d="M 0 ${id} L 5 5 Z"/></svg>`;

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

type FetchLike = typeof fetch;

function backendFetch(options: { cards?: unknown; selectStatus?: number } = {}): {
  fetchFn: FetchLike;
  calls: { url: string; body?: string }[];
} {
  const calls: { url: string; body?: string }[] = [];
  const cards = options.cards ?? CARDS;
  const selectStatus = options.selectStatus ?? 200;
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = String(input);
    calls.push({ url, body: init?.body === undefined ? undefined : String(init.body) });
    if (url === "/candidates") {
      return jsonResponse(cards);
    }
    if (url.endsWith(".svg")) {
      const id = Number(url.replace("/candidates/", "").replace(".svg", ""));
      return new Response(SVG(id), { status: 200, headers: { "Content-Type": "image/svg+xml" } });
    }
    if (url === "/select") {
      if (selectStatus === 200) {
        const body = JSON.parse(String(init?.body ?? "{}")) as { id: number };
        return jsonResponse({ status: "selected", id: body.id });
      }
      return jsonResponse({ error: "candidate id out of range" }, selectStatus);
    }
    return jsonResponse({ error: "not found" }, 404);
  }) as FetchLike;
  return { fetchFn, calls };
}

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<div id="gallery-root"></div>';
  root = document.getElementById("gallery-root") as HTMLElement;
});

describe("parseCandidates", () => {
  it("accepts the wire schema", () => {
    const cards = parseCandidates(CARDS);
    expect(cards).toHaveLength(3);
    expect(cards[1]).toEqual(CARDS[1]);
  });

  it("rejects a non-array payload", () => {
    expect(() => parseCandidates({ cards: [] })).toThrow(/array/);
  });

  it("rejects a missing field", () => {
    const broken = [{ id: 0, seed: 1, points: 10, tour_length_px: 5 }];
    expect(() => parseCandidates(broken)).toThrow(/est_time_min/);
  });

  it("rejects non-numeric fields", () => {
    const broken = [{ ...CARDS[0], points: "many" }];
    expect(() => parseCandidates(broken)).toThrow(/points/);
  });

  it("rejects a fractional id", () => {
    const broken = [{ ...CARDS[0], id: 0.5 }];
    expect(() => parseCandidates(broken)).toThrow(/integer/);
  });
});

describe("loading the grid", () => {
  it("renders one card per candidate", async () => {
    const { fetchFn } = backendFetch();
    const gallery = new Gallery(root, fetchFn);
    await gallery.start();
    expect(gallery.phase).toBe("grid");
    const cards = root.querySelectorAll(".card");
    expect(cards).toHaveLength(3);
    expect((cards[2] as HTMLElement).dataset.id).toBe("2");
  });

  it("keeps the served SVG byte-identical", async () => {
    const { fetchFn } = backendFetch();
    const gallery = new Gallery(root, fetchFn);
    await gallery.start();
    expect(gallery.svgs.get(1)).toBe(SVG(1));
    expect(root.querySelector('[data-id="1"] svg')).not.toBeNull();
  });

  it("shows the generating state and polls while the list is empty", async () => {
    const { fetchFn } = backendFetch({ cards: [] });
    const scheduled: number[] = [];
    const gallery = new Gallery(root, fetchFn, (_fn, ms) => {
      scheduled.push(ms);
    });
    await gallery.start();
    expect(gallery.phase).toBe("loading");
    expect(root.querySelector('[data-state="generating"]')).not.toBeNull();
    expect(scheduled).toHaveLength(1);
  });

  it("shows a retry banner when the backend is unreachable", async () => {
    const fetchFn = (async () => {
      throw new TypeError("connection refused");
    }) as FetchLike;
    const scheduled: number[] = [];
    const gallery = new Gallery(root, fetchFn, (_fn, ms) => {
      scheduled.push(ms);
    });
    await gallery.start();
    expect(root.querySelector('[data-state="retry"]')).not.toBeNull();
    expect(scheduled).toHaveLength(1);
  });

  it("handles malformed JSON without crashing or polling", async () => {
    const { fetchFn } = backendFetch({ cards: [{ id: 0 }] });
    const scheduled: number[] = [];
    const gallery = new Gallery(root, fetchFn, (_fn, ms) => {
      scheduled.push(ms);
    });
    await gallery.start();
    expect(gallery.phase).toBe("loading");
    expect(root.querySelector('[data-state="error"]')).not.toBeNull();
    expect(scheduled).toHaveLength(0);
  });
});

describe("selection", () => {
  it("posts the clicked id", async () => {
    const { fetchFn, calls } = backendFetch();
    const gallery = new Gallery(root, fetchFn);
    await gallery.start();
    (root.querySelector('[data-id="2"]') as HTMLButtonElement).click();
    await vi.waitFor(() => expect(gallery.phase).toBe("confirmed"));
    const select = calls.find((c) => c.url === "/select");
    expect(select?.body).toBe('{"id":2}');
    expect(root.querySelector(".confirmed")).not.toBeNull();
  });

  it("locks the grid after a confirmed selection", async () => {
    const { fetchFn, calls } = backendFetch();
    const gallery = new Gallery(root, fetchFn);
    await gallery.start();
    await gallery.select(1);
    expect(gallery.phase).toBe("confirmed");
    await gallery.select(2); // no path back from confirmed
    const posts = calls.filter((c) => c.url === "/select");
    expect(posts).toHaveLength(1);
    expect((root.querySelector(".confirmed") as HTMLElement).dataset.id).toBe("1");
  });

  it("sends a single POST on a double-click race", async () => {
    const calls: string[] = [];
    let release: (() => void) | undefined;
    const gate = new Promise<void>((resolve) => {
      release = resolve;
    });
    const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
      const url = String(input);
      if (url === "/candidates") return jsonResponse(CARDS);
      if (url.endsWith(".svg")) return new Response(SVG(0), { status: 200 });
      calls.push(String(init?.body));
      await gate;
      return jsonResponse({ status: "selected", id: 0 });
    }) as FetchLike;
    const gallery = new Gallery(root, fetchFn);
    await gallery.start();
    const first = gallery.select(0);
    const second = gallery.select(1); // arrives while the first is in flight
    release?.();
    await Promise.all([first, second]);
    expect(calls).toHaveLength(1);
    expect(gallery.phase).toBe("confirmed");
  });

  it("keeps the grid interactive after a 400", async () => {
    const { fetchFn, calls } = backendFetch({ selectStatus: 400 });
    const gallery = new Gallery(root, fetchFn);
    await gallery.start();
    await gallery.select(9);
    expect(gallery.phase).toBe("grid");
    expect(root.querySelector(".banner.inline")).not.toBeNull();
    expect(root.querySelectorAll(".card")).toHaveLength(3);
    await gallery.select(1); // still selectable
    expect(calls.filter((c) => c.url === "/select")).toHaveLength(2);
  });
});
