// DOM assembly for the trial view: the grid map with HQ/enemy/friendly
// markers and threat labels, and the advice panel shaped by the support
// level. Rendering is a pure function of server payloads.

import type { AdviceView, ScenarioView, TrialView } from "./types.js";

export function renderScenario(scenario: ScenarioView, root: HTMLElement): void {
  root.textContent = "";
  const table = document.createElement("table");
  table.className = "map";
  const marks = new Map<string, { label: string; cls: string; title: string }>();
  marks.set(`${scenario.hq[0]},${scenario.hq[1]}`, {
    label: "HQ",
    cls: "hq",
    title: "headquarters",
  });
  for (const e of scenario.enemies) {
    marks.set(`${e.x},${e.y}`, {
      label: e.id,
      cls: "enemy",
      title: `${e.id} threat ${e.threat.toFixed(1)}`,
    });
  }
  for (const f of scenario.friendlies) {
    marks.set(`${f.x},${f.y}`, { label: f.id, cls: "friendly", title: f.id });
  }
  for (let y = scenario.grid_size - 1; y >= 0; y--) {
    const tr = document.createElement("tr");
    for (let x = 0; x < scenario.grid_size; x++) {
      const td = document.createElement("td");
      const mark = marks.get(`${x},${y}`);
      if (mark) {
        td.textContent = mark.label;
        td.className = mark.cls;
        td.title = mark.title;
      }
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }
  root.appendChild(table);
}

export function renderAdvice(advice: AdviceView, root: HTMLElement): void {
  root.textContent = "";
  const heading = document.createElement("h3");
  heading.textContent = `automation support: ${advice.level.replace("_", " ")}`;
  root.appendChild(heading);

  if (advice.level === "information") {
    const table = document.createElement("table");
    table.className = "distances";
    const head = document.createElement("tr");
    for (const col of ["enemy", "friendly", "distance", "to HQ", "threat"]) {
      const th = document.createElement("th");
      th.textContent = col;
      head.appendChild(th);
    }
    table.appendChild(head);
    for (const row of advice.distances ?? []) {
      const tr = document.createElement("tr");
      for (const cell of [
        row.enemy,
        row.friendly,
        row.distance.toFixed(1),
        row.enemy_hq_distance.toFixed(1),
        row.threat.toFixed(1),
      ]) {
        const td = document.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
    root.appendChild(table);
    return;
  }

  const rec = document.createElement("p");
  rec.className = "recommendation";
  rec.textContent =
    advice.recommended_action === "decline"
      ? "recommendation: no engagement"
      : `recommendation: engage ${advice.recommended_option}`;
  root.appendChild(rec);
  const list = document.createElement("ol");
  for (const pair of advice.pairs) {
    const li = document.createElement("li");
    li.textContent = `${pair.enemy} ← ${pair.friendly} (distance ${pair.distance.toFixed(1)})`;
    list.appendChild(li);
  }
  root.appendChild(list);
}

export interface TrialElements {
  map: HTMLElement;
  advice: HTMLElement;
  status: HTMLElement;
  controls: HTMLElement;
}

/** Paint the whole trial; resolves after two animation frames so the
 * caller can anchor reaction time at actual render completion. */
export function renderTrial(view: TrialView, els: TrialElements): Promise<void> {
  renderScenario(view.scenario, els.map);
  renderAdvice(view.advice, els.advice);
  els.status.textContent = `trial ${view.trial} of ${view.of}`;
  return new Promise((resolve) => {
    requestAnimationFrame(() => requestAnimationFrame(() => resolve()));
  });
}
