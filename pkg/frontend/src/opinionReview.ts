/**
 * Review checklist for one opinion's assumptions and qualifications.
 *
 * All edits go through the item endpoints with the loaded version as the
 * optimistic-concurrency base; a 409 surfaces as a ReloadRequired error so the
 * view can tell the analyst to reload and retry. The discussion is exposed
 * read-only — there is deliberately no way to edit prose from here.
 */

import { ApiClient, ApiError } from "./api.js";
import type { Annotation, OpinionDoc, ReviewItemDoc, Verification } from "./types.js";

export class ReloadRequired extends Error {
  constructor(detail: string) {
    super(`version conflict — reload and retry (${detail})`);
    this.name = "ReloadRequired";
  }
}

export interface ChecklistItem extends ReviewItemDoc {
  section: "assumption" | "qualification";
}

export class OpinionReview {
  private constructor(
    private readonly api: ApiClient,
    readonly opinionId: string,
    private doc: OpinionDoc,
    private version: number,
  ) {}

  static async load(api: ApiClient, opinionId: string): Promise<OpinionReview> {
    const [doc, versions] = await Promise.all([
      api.getDocument<OpinionDoc>("opinions", opinionId),
      api.getVersions("opinions", opinionId),
    ]);
    return new OpinionReview(api, opinionId, doc, versions.latest);
  }

  loadedVersion(): number {
    return this.version;
  }

  document(): OpinionDoc {
    return this.doc;
  }

  items(): ChecklistItem[] {
    return [
      ...this.doc.assumptions.map((item) => ({ ...item, section: "assumption" as const })),
      ...this.doc.qualifications.map((item) => ({ ...item, section: "qualification" as const })),
    ];
  }

  discussion(): string {
    return this.doc.discussion;
  }

  conclusionTexts(): readonly string[] {
    return this.doc.conclusion;
  }

  async reload(): Promise<void> {
    const [doc, versions] = await Promise.all([
      this.api.getDocument<OpinionDoc>("opinions", this.opinionId),
      this.api.getVersions("opinions", this.opinionId),
    ]);
    this.doc = doc;
    this.version = versions.latest;
  }

  async annotate(itemId: string, annotation: Annotation): Promise<void> {
    await this.update(() =>
      this.api.setAnnotation(this.opinionId, itemId, { annotation, baseVersion: this.version }),
    );
  }

  async verify(itemId: string, status: Verification, analystId: string): Promise<void> {
    await this.update(() =>
      this.api.setVerification(this.opinionId, itemId, { status, analystId, baseVersion: this.version }),
    );
  }

  /** Record the analyst's sign-off on the opinion's reasoning. */
  async signOff(assessment: {
    id: string;
    analystId: string;
    verdict: string;
    notes: string;
    assessedAt?: string;
  }): Promise<{ id: string; version: number }> {
    const assessedAt = assessment.assessedAt ?? new Date().toISOString().replace(/\.\d{3}Z$/, "Z");
    return this.api.saveDocument("assessments", {
      schemaVersion: 1,
      id: assessment.id,
      analystId: assessment.analystId,
      assessedAt,
      verdict: assessment.verdict,
      notes: assessment.notes,
    });
  }

  private async update(call: () => Promise<unknown>): Promise<void> {
    try {
      await call();
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        throw new ReloadRequired(error.message);
      }
      throw error;
    }
    await this.reload();
  }
}
