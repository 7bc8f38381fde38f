// Shapes of the documents the search service API exchanges.

export const SOURCES = [
  'github_repos',
  'github_issues',
  'stackoverflow',
  'websearch',
] as const;

export type Source = (typeof SOURCES)[number];

export const VALID_EMBEDDING_DIMS = [512, 1024, 1536] as const;

export type RunStatus =
  | 'planning'
  | 'fetching'
  | 'classifying'
  | 'complete'
  | 'failed';

export interface RunOptions {
  sources: string[];
  query_count: number;
  date_range: [string, string] | null;
  languages: string[];
  llm_model_id: string;
  llm_temperature: number;
  embedding_model_id: string;
  embedding_dims: number;
}

export interface RunDocument {
  run_id: string;
  intent: { id: string; prompt: string; created_at: string };
  options: RunOptions;
  bundle: QueryBundleDocument | null;
  status: RunStatus;
  stage_timestamps: Record<string, string>;
  counts: { fetched: number; after_dedup: number; predicted_relevant: number };
  source_errors: Record<string, string>;
  failure: string | null;
}

export interface QueryDocument {
  source: string;
  terms: string[];
  field_targets: string[];
  qualifiers: Record<string, unknown>;
  origin: string;
}

export interface QueryBundleDocument {
  schema_version: number;
  intent_id: string;
  generator: {
    llm_model_id: string;
    llm_temperature: number;
    prompt_template_version: string;
    generated_at: string;
    llm_failure: string | null;
  };
  queries: QueryDocument[];
}

export interface Prediction {
  label: 'relevant' | 'irrelevant';
  probability: number | null;
  margin: number | null;
}

export interface ResultRow {
  run_id: string;
  item_id: string;
  source: string;
  url: string;
  title: string;
  snippet: string;
  extras: Record<string, unknown>;
  provenance: {
    query_id: string;
    request_id: string;
    page_number: number;
    fetched_at: string;
    endpoint: string;
    attempt_count: number;
  } | null;
  prediction: Prediction;
  rank: number;
  score: number;
}

export interface ResultsPage {
  total: number;
  offset: number;
  limit: number;
  results: ResultRow[];
}

export interface LabelRecord {
  run_id: string;
  item_id: string;
  label: string;
  labeled_at: string;
  labeler: string;
}

export type ResultsView = 'relevant_only' | 'all';

export type Screen = 'compose' | 'query_review' | 'progress' | 'results';
