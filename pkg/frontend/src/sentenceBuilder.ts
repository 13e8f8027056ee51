/**
 * Dropdown-driven sentence composer.
 *
 * Every emitted string is assembled from vocabulary surfaces fetched from the
 * service, and selections are accepted only by id against that vocabulary —
 * free text has no way in, so the parser accepts everything the builder emits.
 */

import type { Term, VocabularyDoc } from "./types.js";

export const SLOTS = ["likelihood", "object", "verb", "predicate"] as const;
export type Slot = (typeof SLOTS)[number];

export interface BuiltSentence {
  text: string;
  likelihood: string;
  object: string;
  verb: string;
  predicate: string;
}

export class SentenceBuilder {
  private vocabulary: VocabularyDoc;
  private selection: Partial<Record<Slot, string>> = {};
  private draft: BuiltSentence[] = [];

  constructor(vocabulary: VocabularyDoc) {
    this.vocabulary = vocabulary;
  }

  options(slot: Slot): readonly Term[] {
    switch (slot) {
      case "likelihood":
        return this.vocabulary.likelihoods;
      case "object":
        return this.vocabulary.objects;
      case "verb":
        return this.vocabulary.verbs;
      case "predicate":
        return this.vocabulary.predicates;
    }
  }

  select(slot: Slot, id: string): void {
    if (!this.options(slot).some((term) => term.id === id)) {
      throw new RangeError(`unknown ${slot} id: ${id}`);
    }
    this.selection[slot] = id;
  }

  selected(slot: Slot): string | undefined {
    return this.selection[slot];
  }

  /**
   * Swap in a newer vocabulary (e.g. after a registry extension); the dropdown
   * options follow the document, and selections that vanished are dropped.
   */
  refresh(vocabulary: VocabularyDoc): void {
    this.vocabulary = vocabulary;
    for (const slot of SLOTS) {
      const id = this.selection[slot];
      if (id !== undefined && !this.options(slot).some((term) => term.id === id)) {
        delete this.selection[slot];
      }
    }
  }

  vocabularyVersion(): number {
    return this.vocabulary.version;
  }

  /** The canonical sentence for the current selection, or null while incomplete. */
  preview(): string | null {
    const terms = this.selectedTerms();
    if (terms === null) return null;
    return `It is ${terms.likelihood.surface} ${terms.object.surface} ${terms.verb.surface} ${terms.predicate.surface}`;
  }

  canEmit(): boolean {
    return this.preview() !== null;
  }

  /** Append the current selection to the conclusion draft. */
  emit(): BuiltSentence {
    const terms = this.selectedTerms();
    const text = this.preview();
    if (terms === null || text === null) {
      throw new RangeError("all four slots must be selected before emitting");
    }
    const built: BuiltSentence = {
      text,
      likelihood: terms.likelihood.id,
      object: terms.object.id,
      verb: terms.verb.id,
      predicate: terms.predicate.id,
    };
    this.draft.push(built);
    return built;
  }

  draftSentences(): readonly BuiltSentence[] {
    return this.draft;
  }

  removeDraft(index: number): void {
    if (index < 0 || index >= this.draft.length) {
      throw new RangeError(`no draft sentence at index ${index}`);
    }
    this.draft.splice(index, 1);
  }

  private selectedTerms(): Record<Slot, Term> | null {
    const resolved: Partial<Record<Slot, Term>> = {};
    for (const slot of SLOTS) {
      const id = this.selection[slot];
      if (id === undefined) return null;
      const term = this.options(slot).find((candidate) => candidate.id === id);
      if (term === undefined) return null;
      resolved[slot] = term;
    }
    return resolved as Record<Slot, Term>;
  }
}
