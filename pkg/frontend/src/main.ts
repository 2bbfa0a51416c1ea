// Browser entry point: session flow from start to questionnaire. All
// events post through the retry queue; timing anchors on render
// completion; the full session is keyboard-operable (digits pick units,
// Enter engages, N declines, A acknowledges the probe).

import { ApiClient } from "./api.js";
import { QuestionnaireForm, LIKERT_MAX, LIKERT_MIN, QUESTIONNAIRE_ITEMS } from "./questionnaire.js";
import { renderTrial } from "./render.js";
import { TrialController, type Selection } from "./trial.js";
import type { TrialView } from "./types.js";

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? "http://127.0.0.1:8765";
}

class SessionFlow {
  private controller: TrialController | null = null;
  private enemyPick: string | null = null;
  private friendlyPick: string | null = null;

  constructor(private readonly api: ApiClient) {}

  async start(subject: string): Promise<void> {
    const created = await this.api.createSession(subject);
    el("intro").hidden = true;
    el("task").hidden = false;
    await this.showTrial(created.trial);
  }

  private async showTrial(view: TrialView): Promise<void> {
    this.enemyPick = null;
    this.friendlyPick = null;
    this.controller = new TrialController(view, this.api.clock);
    this.renderPickers(view);
    await renderTrial(view, {
      map: el("map"),
      advice: el("advice"),
      status: el("status"),
      controls: el("controls"),
    });
    this.controller.markRendered();
    this.setControlsEnabled(true);
  }

  private renderPickers(view: TrialView): void {
    const enemies = el("enemy-pick");
    const friendlies = el("friendly-pick");
    enemies.textContent = "";
    friendlies.textContent = "";
    for (const e of view.scenario.enemies) {
      enemies.appendChild(this.pickButton(e.id, () => (this.enemyPick = e.id)));
    }
    for (const f of view.scenario.friendlies) {
      friendlies.appendChild(this.pickButton(f.id, () => (this.friendlyPick = f.id)));
    }
  }

  private pickButton(label: string, onPick: () => void): HTMLButtonElement {
    const button = document.createElement("button");
    button.textContent = label;
    button.addEventListener("click", () => {
      onPick();
      el("picked").textContent = `${this.enemyPick ?? "?"} : ${this.friendlyPick ?? "?"}`;
    });
    return button;
  }

  private setControlsEnabled(enabled: boolean): void {
    el("controls")
      .querySelectorAll("button")
      .forEach((button) => {
        button.disabled = !enabled;
      });
  }

  async submit(selection: Selection): Promise<void> {
    if (!this.controller) return;
    const event = this.controller.decide(selection);
    if (!event) return; // not rendered yet, or already decided
    this.setControlsEnabled(false);
    await this.api.postEvents([event]);
    await this.probe();
    await this.next();
  }

  private async probe(): Promise<void> {
    if (!this.controller) return;
    const shown = this.controller.showProbe();
    if (!shown) return;
    el("probe").hidden = false;
    await this.api.postEvents([shown]);
    await new Promise<void>((resolve) => {
      const done = async () => {
        const answer = this.controller!.answerProbe();
        el("probe").hidden = true;
        if (answer) await this.api.postEvents([answer]);
        resolve();
      };
      el("probe-ack").addEventListener("click", done, { once: true });
    });
  }

  private async next(): Promise<void> {
    const current = this.controller?.view;
    if (!current) return;
    if (current.trial >= current.of) {
      el("task").hidden = true;
      this.questionnaire();
      return;
    }
    const view = await this.api.getTrial(current.trial + 1);
    await this.showTrial(view);
  }

  private questionnaire(): void {
    const form = new QuestionnaireForm();
    const root = el("questionnaire");
    root.hidden = false;
    const fields = el("q-items");
    fields.textContent = "";
    for (const name of QUESTIONNAIRE_ITEMS) {
      const row = document.createElement("label");
      row.textContent = `${name.replace("_", " ")} (${LIKERT_MIN}-${LIKERT_MAX}): `;
      const input = document.createElement("input");
      input.type = "number";
      input.min = String(LIKERT_MIN);
      input.max = String(LIKERT_MAX);
      input.addEventListener("change", () => {
        form.set(name, Number(input.value));
        submit.disabled = !form.isComplete();
      });
      row.appendChild(input);
      fields.appendChild(row);
    }
    const submit = el("q-submit") as HTMLButtonElement;
    submit.disabled = true;
    submit.addEventListener(
      "click",
      async () => {
        await this.api.postQuestionnaire(form.payload());
        const done = await this.api.complete();
        root.hidden = true;
        el("done").hidden = false;
        el("log-path").textContent = done.log_path;
      },
      { once: true },
    );
  }

  bindKeyboard(): void {
    window.addEventListener("keydown", (ev) => {
      const view = this.controller?.view;
      if (!view || el("task").hidden) return;
      const digit = Number(ev.key);
      if (!ev.shiftKey && digit >= 1 && digit <= view.scenario.enemies.length) {
        this.enemyPick = view.scenario.enemies[digit - 1].id;
      } else if (ev.shiftKey && digit >= 1 && digit <= view.scenario.friendlies.length) {
        this.friendlyPick = view.scenario.friendlies[digit - 1].id;
      } else if (ev.key === "Enter" && this.enemyPick && this.friendlyPick) {
        void this.submit({
          action: "engage",
          enemy: this.enemyPick,
          friendly: this.friendlyPick,
        });
        return;
      } else if (ev.key.toLowerCase() === "n") {
        void this.submit({ action: "decline" });
        return;
      } else if (ev.key.toLowerCase() === "a" && !el("probe").hidden) {
        el("probe-ack").click();
        return;
      }
      el("picked").textContent = `${this.enemyPick ?? "?"} : ${this.friendlyPick ?? "?"}`;
    });
  }
}

export function boot(): void {
  const api = new ApiClient(apiBase());
  const flow = new SessionFlow(api);
  flow.bindKeyboard();
  el("start").addEventListener("click", () => {
    const subject = (el("subject") as HTMLInputElement).value || "anonymous";
    void flow.start(subject);
  });
  el("engage").addEventListener("click", () => {
    const picked = el("picked").textContent ?? "";
    const [enemy, friendly] = picked.split(" : ");
    if (enemy && friendly && enemy !== "?" && friendly !== "?") {
      void flow.submit({ action: "engage", enemy, friendly });
    }
  });
  el("decline").addEventListener("click", () => void flow.submit({ action: "decline" }));
}

if (typeof document !== "undefined" && document.getElementById("start")) {
  boot();
}
