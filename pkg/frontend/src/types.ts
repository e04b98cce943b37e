/** Payload shapes of the five read-only API routes. */

export interface CorpusDescriptor {
  id: string;
  label: string;
  order_index: number;
  vocab_size: number;
  high_conf_count: number;
  m: number;
  dim: number;
  k: number;
  threshold: number;
  n_neighbors: number;
  perplexity: number;
  iterations: number;
  seed: number;
}

export interface ProjectionPoint {
  id: string;
  term: string;
  group: string;
  x: number;
  y: number;
}

export interface Projection {
  corpus_id: string;
  aligned: boolean;
  points: ProjectionPoint[];
}

export interface SearchResult {
  id: string;
  preferred_term: string;
  semantic_group: string;
  matched_term: string;
  match_kind: "exact" | "prefix" | "substring";
}

export interface SearchResponse {
  query: string;
  results: SearchResult[];
}

export interface NeighborRow {
  id: string;
  preferred_term: string;
  mean_sim: number;
  std_sim: number;
}

export interface CorpusBlock {
  corpus_id: string;
  label: string;
  present: boolean;
  ec: number | null;
  high_confidence: boolean;
  warning: boolean;
  neighbors: NeighborRow[];
}

export interface ConceptDetail {
  id: string;
  preferred_term: string;
  synonyms: string[];
  semantic_group: string;
  definitions: string[];
  corpora: CorpusBlock[];
}

export interface SimilarityPoint {
  corpus_id: string;
  mean: number | null;
  std: number | null;
  ref_high_conf: boolean;
  cmp_high_conf: boolean;
  present: boolean;
}

export interface SimilaritySeries {
  reference: string;
  comparison: string;
  points: SimilarityPoint[];
}

export interface SimilarityResponse {
  series: SimilaritySeries[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
