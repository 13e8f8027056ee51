/**
 * Single-page workbench app: sentence builder, opinion review, what-if panel
 * and audit viewer, each backed by its model and the shared API client.
 *
 * Served by the nettingdesk service itself at /ui/, so same-origin requests
 * need no configuration.
 */

import { ApiClient, ApiError } from "./api.js";
import { AuditView } from "./auditView.js";
import { formatRange } from "./format.js";
import { OpinionReview, ReloadRequired } from "./opinionReview.js";
import { describeReason } from "./reasons.js";
import { SentenceBuilder, SLOTS, type Slot } from "./sentenceBuilder.js";
import { WhatIfPanel } from "./whatIf.js";
import type { Annotation, DocumentKind, PolicyDoc, Verification } from "./types.js";

const api = new ApiClient("");

type ElInit = {
  text?: string;
  className?: string;
  attrs?: Record<string, string>;
  children?: Array<HTMLElement | string>;
};

function el<K extends keyof HTMLElementTagNameMap>(tag: K, init: ElInit = {}): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (init.text !== undefined) node.textContent = init.text;
  if (init.className !== undefined) node.className = init.className;
  for (const [name, value] of Object.entries(init.attrs ?? {})) node.setAttribute(name, value);
  for (const child of init.children ?? []) node.append(child);
  return node;
}

function banner(target: HTMLElement, kind: "info" | "error", message: string): void {
  target.replaceChildren(el("div", { className: `banner ${kind}`, text: message }));
}

function reportError(target: HTMLElement, error: unknown): void {
  if (error instanceof ReloadRequired) {
    banner(target, "error", error.message);
  } else if (error instanceof ApiError && error.isConflict) {
    banner(target, "error", `version conflict — reload and retry (${error.message})`);
  } else if (error instanceof ApiError) {
    banner(target, "error", `${error.reasonId}: ${error.message}`);
  } else {
    banner(target, "error", String(error));
  }
}

// --- sentence builder view ----------------------------------------------------

function builderView(): HTMLElement {
  const root = el("section");
  const status = el("div");
  const preview = el("p", { className: "preview", text: "Select all four slots to preview." });
  const draftList = el("ul", { className: "draft" });
  const selects = new Map<Slot, HTMLSelectElement>();
  let builder: SentenceBuilder | null = null;

  const controls = el("div", { className: "slot-row" });
  for (const slot of SLOTS) {
    const select = el("select", { attrs: { "data-slot": slot } });
    select.addEventListener("change", () => {
      if (builder !== null && select.value !== "") {
        builder.select(slot, select.value);
        renderPreview();
      }
    });
    selects.set(slot, select);
    controls.append(el("label", { text: slot, children: [select] }));
  }

  function renderPreview(): void {
    const text = builder?.preview() ?? null;
    preview.textContent = text ?? "Select all four slots to preview.";
    emitButton.disabled = builder === null || !builder.canEmit();
  }

  function renderDraft(): void {
    draftList.replaceChildren();
    builder?.draftSentences().forEach((sentence, index) => {
      const remove = el("button", { text: "remove" });
      remove.addEventListener("click", () => {
        builder?.removeDraft(index);
        renderDraft();
      });
      draftList.append(el("li", { text: sentence.text + " ", children: [remove] }));
    });
  }

  const emitButton = el("button", { text: "Add to conclusion draft" });
  emitButton.disabled = true;
  emitButton.addEventListener("click", () => {
    try {
      builder?.emit();
      renderDraft();
    } catch (error) {
      reportError(status, error);
    }
  });

  const refreshButton = el("button", { text: "Refresh vocabulary" });
  refreshButton.addEventListener("click", () => void load());

  async function load(): Promise<void> {
    try {
      const vocabulary = await api.vocabulary();
      if (builder === null) {
        builder = new SentenceBuilder(vocabulary);
      } else {
        builder.refresh(vocabulary);
      }
      for (const slot of SLOTS) {
        const select = selects.get(slot)!;
        select.replaceChildren(el("option", { text: `— ${slot} —`, attrs: { value: "" } }));
        for (const term of builder.options(slot)) {
          select.append(el("option", { text: term.surface, attrs: { value: term.id } }));
        }
        const chosen = builder.selected(slot);
        select.value = chosen ?? "";
      }
      banner(status, "info", `vocabulary v${builder.vocabularyVersion()} loaded`);
      renderPreview();
      renderDraft();
    } catch (error) {
      reportError(status, error);
    }
  }

  root.append(el("h2", { text: "Sentence builder" }), status, controls, preview, emitButton, refreshButton, draftList);
  void load();
  return root;
}

// --- opinion review view --------------------------------------------------------

function reviewView(): HTMLElement {
  const root = el("section");
  const status = el("div");
  const idInput = el("input", { attrs: { placeholder: "opinion id", value: "" } });
  const loadButton = el("button", { text: "Load" });
  const itemsTable = el("table", { className: "items" });
  const discussion = el("blockquote");
  const conclusionList = el("ul");
  const analystInput = el("input", { attrs: { placeholder: "analyst id", value: "" } });
  let review: OpinionReview | null = null;

  const ANNOTATIONS: Annotation[] = ["Positive", "Neutral", "Negative", "Missing"];
  const VERIFICATIONS: Verification[] = ["Unverified", "Verified", "Failed", "Waived"];

  function render(): void {
    if (review === null) return;
    itemsTable.replaceChildren(
      el("tr", {
        children: ["section", "item", "text", "annotation", "verification", ""].map((h) => el("th", { text: h })),
      }),
    );
    for (const item of review.items()) {
      const annotationSelect = el("select");
      for (const value of ANNOTATIONS) {
        annotationSelect.append(el("option", { text: value, attrs: { value } }));
      }
      annotationSelect.value = item.annotation;
      annotationSelect.addEventListener("change", () => {
        void review
          ?.annotate(item.id, annotationSelect.value as Annotation)
          .then(render)
          .catch((error) => reportError(status, error));
      });

      const verifySelect = el("select");
      for (const value of VERIFICATIONS) {
        verifySelect.append(el("option", { text: value, attrs: { value } }));
      }
      verifySelect.value = item.verification;
      const applyButton = el("button", { text: "apply" });
      applyButton.addEventListener("click", () => {
        void review
          ?.verify(item.id, verifySelect.value as Verification, analystInput.value || "analyst")
          .then(render)
          .catch((error) => reportError(status, error));
      });

      itemsTable.append(
        el("tr", {
          children: [
            el("td", { text: item.section }),
            el("td", { text: item.id }),
            el("td", { text: item.text }),
            el("td", { children: [annotationSelect] }),
            el("td", { children: [verifySelect] }),
            el("td", { children: [applyButton] }),
          ],
        }),
      );
    }
    discussion.textContent = review.discussion();
    conclusionList.replaceChildren(...review.conclusionTexts().map((text) => el("li", { text })));
    banner(status, "info", `${review.opinionId} v${review.loadedVersion()}`);
  }

  loadButton.addEventListener("click", () => {
    void OpinionReview.load(api, idInput.value)
      .then((loaded) => {
        review = loaded;
        render();
      })
      .catch((error) => reportError(status, error));
  });

  const verdictSelect = el("select");
  for (const verdict of ["ReasoningAcceptable", "ReasoningRejected"]) {
    verdictSelect.append(el("option", { text: verdict, attrs: { value: verdict } }));
  }
  const notesInput = el("input", { attrs: { placeholder: "notes" } });
  const signOffButton = el("button", { text: "Sign off" });
  signOffButton.addEventListener("click", () => {
    if (review === null) return;
    void review
      .signOff({
        id: `${review.opinionId}:${new Date().toISOString().slice(0, 10)}`,
        analystId: analystInput.value || "analyst",
        verdict: verdictSelect.value,
        notes: notesInput.value,
      })
      .then((saved) => banner(status, "info", `assessment ${saved.id} v${saved.version} recorded`))
      .catch((error) => reportError(status, error));
  });

  root.append(
    el("h2", { text: "Opinion review" }),
    status,
    el("div", { children: [idInput, loadButton, analystInput] }),
    itemsTable,
    el("h3", { text: "Discussion (read-only)" }),
    discussion,
    el("h3", { text: "Conclusion" }),
    conclusionList,
    el("div", { children: [verdictSelect, notesInput, signOffButton] }),
  );
  return root;
}

// --- what-if view ----------------------------------------------------------------

function whatIfView(): HTMLElement {
  const root = el("section");
  const status = el("div");
  const setup = el("textarea", {
    attrs: { rows: "6", placeholder: '{"factsId": "...", "opinionIds": ["..."], "policyId": "...", "assessmentId": "...", "asOfDate": "2025-09-01"}' },
  });
  const startButton = el("button", { text: "Start panel" });
  const controls = el("div", { className: "slot-row" });
  const results = el("div");
  let panel: WhatIfPanel | null = null;

  async function start(): Promise<void> {
    try {
      const config = JSON.parse(setup.value) as {
        factsId: string;
        opinionIds: string[];
        policyId: string;
        assessmentId: string;
        asOfDate: string;
      };
      const policy = await api.getDocument<PolicyDoc>("policies", config.policyId);
      const versions = await api.getVersions("policies", config.policyId);
      panel = new WhatIfPanel(
        api,
        policy,
        {
          factsId: config.factsId,
          opinionIds: config.opinionIds,
          assessmentId: config.assessmentId,
          asOfDate: config.asOfDate,
        },
        versions.latest,
      );
      renderControls();
      banner(status, "info", `policy ${policy.id} v${versions.latest} loaded`);
    } catch (error) {
      reportError(status, error);
    }
  }

  function renderControls(): void {
    if (panel === null) return;
    controls.replaceChildren();
    const effective = panel.effectiveWeights();
    for (const factorId of panel.factorIds()) {
      const input = el("input", {
        attrs: { type: "number", min: "0", step: "1", value: String(effective.get(factorId)) },
      });
      input.addEventListener("change", () => {
        try {
          panel?.setWeight(factorId, Number(input.value));
          renderControls();
          void runAndRender();
        } catch (error) {
          reportError(status, error);
        }
      });
      controls.append(
        el("label", {
          text: `${factorId} (effective ${effective.get(factorId)} bp)`,
          children: [input],
        }),
      );
    }
    const thresholdInput = el("input", { attrs: { type: "number", min: "0", max: "10000", step: "1" } });
    thresholdInput.value = String(panel.effectivePolicy().thresholdBp);
    thresholdInput.addEventListener("change", () => {
      try {
        panel?.setThreshold(Number(thresholdInput.value));
        void runAndRender();
      } catch (error) {
        reportError(status, error);
      }
    });
    controls.append(el("label", { text: "threshold bp", children: [thresholdInput] }));

    const persistButton = el("button", { text: "Persist policy + determination" });
    persistButton.addEventListener("click", () => {
      void panel
        ?.persist()
        .then((saved) =>
          banner(status, "info", `policy v${saved.policyVersion}, determination ${saved.relationshipId} v${saved.determinationVersion}`),
        )
        .catch((error) => reportError(status, error));
    });
    controls.append(persistButton);
  }

  async function runAndRender(): Promise<void> {
    if (panel === null) return;
    try {
      await panel.run();
      const display = panel.display();
      if (display === null) return;
      const factorRows = display.factors.map((factor) =>
        el("tr", {
          children: [
            el("td", { text: factor.factorId }),
            el("td", { text: factor.status }),
            el("td", { text: formatRange(factor.adverseRange) }),
            el("td", { text: factor.resolution ?? "" }),
          ],
        }),
      );
      results.replaceChildren(
        el("p", {
          text: `${display.relationshipId} — flag ${display.flag}, aggregate ${formatRange(display.overallRisk)} (as of ${display.determinedAt})`,
          className: display.flag === "Yes" ? "flag-yes" : "flag-no",
        }),
        el("table", {
          className: "items",
          children: [
            el("tr", { children: ["factor", "status", "adverse range", "resolution"].map((h) => el("th", { text: h })) }),
            ...factorRows,
          ],
        }),
        el("ul", {
          children: display.blockingReasons.map((reason) =>
            el("li", { text: describeReason(reason.reasonId, reason.detail) }),
          ),
        }),
      );
    } catch (error) {
      reportError(status, error);
    }
  }

  startButton.addEventListener("click", () => void start());
  root.append(el("h2", { text: "What-if" }), status, setup, startButton, controls, results);
  return root;
}

// --- audit view ------------------------------------------------------------------

function auditViewSection(): HTMLElement {
  const root = el("section");
  const status = el("div");
  const view = new AuditView(api);
  const kindSelect = el("select");
  for (const kind of ["opinions", "policies", "facts", "assessments", "determinations", "registries"]) {
    kindSelect.append(el("option", { text: kind, attrs: { value: kind } }));
  }
  const idInput = el("input", { attrs: { placeholder: "entity id" } });
  const loadButton = el("button", { text: "History" });
  const historyTable = el("table", { className: "items" });
  const chainLine = el("p");

  loadButton.addEventListener("click", () => {
    void (async () => {
      try {
        const { rows } = await view.history(kindSelect.value as DocumentKind, idInput.value);
        historyTable.replaceChildren(
          el("tr", { children: ["version", ""].map((h) => el("th", { text: h })) }),
          ...rows.map((row) =>
            el("tr", {
              children: [
                el("td", { text: `v${row.version}` }),
                el("td", { text: row.isLatest ? "latest" : "" }),
              ],
            }),
          ),
        );
        chainLine.textContent = await view.describeChain();
      } catch (error) {
        reportError(status, error);
      }
    })();
  });

  root.append(
    el("h2", { text: "Audit" }),
    status,
    el("div", { children: [kindSelect, idInput, loadButton] }),
    historyTable,
    chainLine,
  );
  return root;
}

// --- shell -------------------------------------------------------------------------

function main(): void {
  const app = document.getElementById("app");
  if (app === null) return;
  const views: Array<[string, () => HTMLElement]> = [
    ["Builder", builderView],
    ["Opinion review", reviewView],
    ["What-if", whatIfView],
    ["Audit", auditViewSection],
  ];
  const nav = el("nav");
  const body = el("main");
  views.forEach(([label, build], index) => {
    const button = el("button", { text: label });
    button.addEventListener("click", () => body.replaceChildren(build()));
    nav.append(button);
    if (index === 0) body.replaceChildren(build());
  });
  app.replaceChildren(el("h1", { text: "nettingdesk workbench" }), nav, body);
}

main();
