// Selection gallery: fetch the candidate curves, show them side by side,
// let the human click exactly one, and lock the grid once the backend
// confirms. State only ever moves forward: loading -> grid -> confirmed.
const CARD_FIELDS = ["id", "seed", "points", "tour_length_px", "est_time_min"];
export function parseCandidates(data) {
    if (!Array.isArray(data)) {
        throw new Error("candidate list must be a JSON array");
    }
    return data.map((item, index) => {
        if (typeof item !== "object" || item === null) {
            throw new Error(`candidate ${index} is not an object`);
        }
        const record = item;
        for (const field of CARD_FIELDS) {
            const value = record[field];
            if (typeof value !== "number" || !Number.isFinite(value)) {
                throw new Error(`candidate ${index}: field "${field}" must be a finite number`);
            }
        }
        if (!Number.isInteger(record.id)) {
            throw new Error(`candidate ${index}: id must be an integer`);
        }
        return {
            id: record.id,
            seed: record.seed,
            points: record.points,
            tour_length_px: record.tour_length_px,
            est_time_min: record.est_time_min,
        };
    });
}
const POLL_MS = 2000;
export class Gallery {
    constructor(root, fetchFn = fetch.bind(globalThis), schedule = (fn, ms) => {
        setTimeout(fn, ms);
    }) {
        this.root = root;
        this.fetchFn = fetchFn;
        this.schedule = schedule;
        this.phase = "loading";
        this.cards = [];
        this.svgs = new Map();
        this.selectInFlight = false;
        this.confirmedId = null;
    }
    async start() {
        let payload;
        try {
            const resp = await this.fetchFn("/candidates");
            if (!resp.ok) {
                throw new Error(`backend answered ${resp.status}`);
            }
            payload = await resp.json();
        }
        catch (err) {
            this.renderRetryBanner(`Backend unreachable: ${String(err)}`);
            this.schedule(() => void this.start(), POLL_MS);
            return;
        }
        let cards;
        try {
            cards = parseCandidates(payload);
        }
        catch (err) {
            this.renderError(`Bad candidate data: ${String(err)}`);
            return;
        }
        if (cards.length === 0) {
            this.renderGenerating();
            this.schedule(() => void this.start(), POLL_MS);
            return;
        }
        this.cards = cards;
        await this.loadSvgs();
        if (this.phase === "loading") {
            this.phase = "grid";
        }
        this.renderGrid();
    }
    async loadSvgs() {
        for (const card of this.cards) {
            try {
                const resp = await this.fetchFn(`/candidates/${card.id}.svg`);
                if (resp.ok) {
                    // Stored verbatim: the grid must show exactly the served asset.
                    this.svgs.set(card.id, await resp.text());
                }
            }
            catch {
                // A missing preview leaves a placeholder; selection still works.
            }
        }
    }
    async select(id) {
        if (this.phase !== "grid" || this.selectInFlight) {
            return;
        }
        this.selectInFlight = true;
        try {
            const resp = await this.fetchFn("/select", {
                method: "POST",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify({ id }),
            });
            if (resp.ok) {
                this.confirmedId = id;
                this.phase = "confirmed";
                this.renderConfirmed();
            }
            else {
                let message = `selection rejected (${resp.status})`;
                try {
                    const body = (await resp.json());
                    if (body.error) {
                        message = body.error;
                    }
                }
                catch {
                    // keep the status-based message
                }
                this.renderInlineError(message);
            }
        }
        catch (err) {
            this.renderInlineError(`selection failed: ${String(err)}`);
        }
        finally {
            this.selectInFlight = false;
        }
    }
    // ---- rendering ----------------------------------------------------
    clear() {
        this.root.textContent = "";
        return this.root;
    }
    header(subtitle) {
        const head = document.createElement("header");
        const title = document.createElement("h1");
        title.textContent = "Pick a curve";
        const sub = document.createElement("p");
        sub.className = "subtitle";
        sub.textContent = subtitle;
        head.append(title, sub);
        return head;
    }
    renderGenerating() {
        const root = this.clear();
        root.append(this.header("Generating candidates…"));
        const spinner = document.createElement("div");
        spinner.className = "state-note";
        spinner.dataset.state = "generating";
        spinner.textContent = "The pipeline is still drawing candidates; this page refreshes itself.";
        root.append(spinner);
    }
    renderRetryBanner(message) {
        const root = this.clear();
        root.append(this.header("Waiting for the backend"));
        const banner = document.createElement("div");
        banner.className = "banner error";
        banner.dataset.state = "retry";
        banner.textContent = `${message} — retrying`;
        root.append(banner);
    }
    renderError(message) {
        const root = this.clear();
        root.append(this.header("Something went wrong"));
        const banner = document.createElement("div");
        banner.className = "banner error";
        banner.dataset.state = "error";
        banner.textContent = message;
        root.append(banner);
    }
    renderInlineError(message) {
        const existing = this.root.querySelector(".banner.inline");
        if (existing) {
            existing.textContent = message;
            return;
        }
        const banner = document.createElement("div");
        banner.className = "banner error inline";
        banner.textContent = message;
        this.root.prepend(banner);
    }
    renderGrid() {
        const root = this.clear();
        root.append(this.header(`${this.cards.length} candidate${this.cards.length === 1 ? "" : "s"} — click one to draw it`));
        const grid = document.createElement("main");
        grid.className = "grid";
        for (const card of this.cards) {
            grid.append(this.buildCard(card));
        }
        root.append(grid);
    }
    buildCard(card) {
        const tile = document.createElement("button");
        tile.className = "card";
        tile.type = "button";
        tile.dataset.id = String(card.id);
        tile.addEventListener("click", () => void this.select(card.id));
        const figure = document.createElement("figure");
        figure.className = "preview";
        const svg = this.svgs.get(card.id);
        if (svg !== undefined) {
            figure.innerHTML = svg;
        }
        else {
            figure.textContent = "(no preview)";
        }
        const caption = document.createElement("figcaption");
        caption.textContent =
            `#${card.id} · ${card.points} points · ` +
                `${card.est_time_min.toFixed(1)} min · ${Math.round(card.tour_length_px)} px`;
        tile.append(figure, caption);
        return tile;
    }
    renderConfirmed() {
        const card = this.cards.find((c) => c.id === this.confirmedId);
        const root = this.clear();
        root.append(this.header("Committed — the plotter takes it from here"));
        const stage = document.createElement("section");
        stage.className = "confirmed";
        stage.dataset.id = String(this.confirmedId);
        const figure = document.createElement("figure");
        figure.className = "preview full";
        const svg = this.confirmedId === null ? undefined : this.svgs.get(this.confirmedId);
        if (svg !== undefined) {
            figure.innerHTML = svg;
        }
        const note = document.createElement("p");
        note.className = "state-note";
        note.textContent = card
            ? `Candidate ${card.id}: ${card.points} points, about ${card.est_time_min.toFixed(1)} minutes of drawing.`
            : "Selection confirmed.";
        stage.append(figure, note);
        root.append(stage);
    }
}
export function mount(root, fetchFn = fetch.bind(globalThis)) {
    const gallery = new Gallery(root, fetchFn);
    void gallery.start();
    return gallery;
}
// Browser entry point; tests import the pieces and drive them directly.
if (typeof document !== "undefined" && document.getElementById("gallery-root") !== null) {
    mount(document.getElementById("gallery-root"));
}
