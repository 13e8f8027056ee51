/**
 * Version history and audit-chain status for any stored entity.
 *
 * Strictly read-only: the audit log has no write endpoint, and this view only
 * relays what the service reports about its own hash chain.
 */

import { ApiClient } from "./api.js";
import type { AuditVerifyDoc, DocumentKind, VersionsDoc } from "./types.js";

export interface HistoryEntry {
  version: number;
  isLatest: boolean;
}

export class AuditView {
  constructor(private readonly api: ApiClient) {}

  async history(kind: DocumentKind, id: string): Promise<{ doc: VersionsDoc; rows: HistoryEntry[] }> {
    const doc = await this.api.getVersions(kind, id);
    const rows = doc.versions.map((version) => ({ version, isLatest: version === doc.latest }));
    return { doc, rows };
  }

  async chainStatus(): Promise<AuditVerifyDoc> {
    return this.api.auditVerify();
  }

  async describeChain(): Promise<string> {
    const status = await this.chainStatus();
    if (status.valid) {
      return `audit chain intact (${status.entries} entries)`;
    }
    return `AUDIT CHAIN BROKEN at entry ${status.brokenAt}`;
  }

  async entries(): Promise<Array<Record<string, unknown>>> {
    return (await this.api.audit()).entries;
  }
}
