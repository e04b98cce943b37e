/** Pure view logic for Compare.
 *
 * Omission policy: a corpus point is dropped from the line exactly when the
 * reference concept is not high-confidence there (the dropped corpora are
 * named in a footnote). A point whose comparison concept is low-confidence
 * stays on the line but renders hollow. Corpora where a concept is absent
 * leave a gap and are listed separately.
 */

import type { SimilarityResponse } from "../types.js";

export interface ChartPoint {
  corpusId: string;
  mean: number;
  std: number;
  hollow: boolean;
}

export interface ChartLine {
  comparison: string;
  points: ChartPoint[];
  absentCorpora: string[];
}

export interface CompareChart {
  reference: string;
  corpusOrder: string[];
  lines: ChartLine[];
  omittedCorpora: string[];
  footnote: string | null;
}

export function buildCompareChart(response: SimilarityResponse): CompareChart {
  if (response.series.length === 0) {
    return {
      reference: "",
      corpusOrder: [],
      lines: [],
      omittedCorpora: [],
      footnote: null,
    };
  }
  const first = response.series[0];
  const corpusOrder = first.points.map((p) => p.corpus_id);
  const omitted = first.points
    .filter((p) => p.present && !p.ref_high_conf)
    .map((p) => p.corpus_id);
  const omittedSet = new Set(omitted);

  const lines = response.series.map((series) => {
    const points: ChartPoint[] = [];
    const absent: string[] = [];
    for (const point of series.points) {
      if (!point.present) {
        absent.push(point.corpus_id);
        continue;
      }
      if (omittedSet.has(point.corpus_id)) {
        continue;
      }
      points.push({
        corpusId: point.corpus_id,
        mean: point.mean as number,
        std: point.std as number,
        hollow: !point.cmp_high_conf,
      });
    }
    return { comparison: series.comparison, points, absentCorpora: absent };
  });

  return {
    reference: first.reference,
    corpusOrder,
    lines,
    omittedCorpora: omitted,
    footnote:
      omitted.length > 0
        ? `${omitted.join(", ")} omitted: ${first.reference} is not ` +
          "high-confidence there"
        : null,
  };
}
