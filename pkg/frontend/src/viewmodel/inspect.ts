/** Pure view logic for Inspect: one column per corpus in corpus order, a
 * warning banner exactly where the concept is present but low-confidence,
 * and the confidence trajectory for the side panel sparkline. */

import type { ConceptDetail, CorpusBlock } from "../types.js";

export interface InspectColumn {
  corpusId: string;
  label: string;
  present: boolean;
  warning: boolean;
  ec: number | null;
  highConfidence: boolean;
  neighbors: CorpusBlock["neighbors"];
}

export interface SparklinePoint {
  corpusId: string;
  ec: number | null;
}

export interface InspectView {
  conceptId: string;
  term: string;
  group: string;
  synonyms: string[];
  definitions: string[];
  columns: InspectColumn[];
  sparkline: SparklinePoint[];
}

export function buildInspect(detail: ConceptDetail): InspectView {
  const columns = detail.corpora.map((block) => ({
    corpusId: block.corpus_id,
    label: block.label,
    present: block.present,
    warning: block.warning,
    ec: block.ec,
    highConfidence: block.high_confidence,
    neighbors: block.neighbors,
  }));
  return {
    conceptId: detail.id,
    term: detail.preferred_term,
    group: detail.semantic_group,
    synonyms: detail.synonyms,
    definitions: detail.definitions,
    columns,
    sparkline: columns.map((c) => ({ corpusId: c.corpusId, ec: c.ec })),
  };
}

/** Corpus ids whose column must carry the low-confidence warning banner. */
export function warningCorpora(view: InspectView): string[] {
  return view.columns.filter((c) => c.warning).map((c) => c.corpusId);
}
