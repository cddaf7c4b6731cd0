// Shapes mirrored from the HTTP API's JSON responses.

export interface Candidate {
  candidate_id: string;
  text: string;
  origin: 'generated' | 'merged' | 'annotator_edited';
  model_id: string;
  prompt_hash: string;
  rank: number | null;
  status: 'proposed' | 'edited' | 'accepted' | 'discarded';
  created_at: string;
}

export interface Lease {
  annotator_id: string;
  expires_at: number;
}

export type ItemState =
  | 'pending'
  | 'drafted'
  | 'in_review'
  | 'accepted'
  | 'discarded';

export interface AnnotationItem {
  item_id: string;
  query_id: string;
  sql: string;
  state: ItemState;
  cte_name: string | null;
  parent_id: string | null;
  candidates: Candidate[];
  sub_items: AnnotationItem[];
  refinement_notes: string[];
  lease: Lease | null;
  accepted_text: string | null;
  is_nested?: boolean;
}

export interface TableDef {
  name: string;
  columns: [string, string][];
  primary_key: string[];
}

export interface ProjectStats {
  items: number;
  by_state: Record<string, number>;
}

export interface Project {
  project_id: string;
  name: string;
  dialect: string;
  schema_id: string | null;
  created_at: string;
  stats?: ProjectStats;
  schema?: { schema_id: string; tables: TableDef[] } | null;
}

export interface RubricJudgment {
  level: 1 | 2 | 3 | 4 | 5;
  reason: string;
  detail: string;
  auto: boolean;
  overridden_by: string | null;
}

export interface ItemEval {
  item_id: string;
  sql: string;
  question: string;
  regenerated_sql: string;
  rubric: RubricJudgment;
  exec_match: boolean;
  exact_match: boolean;
  bleu: number | null;
  rouge_l: number | null;
}

export interface EvalReport {
  items: ItemEval[];
  aggregates: {
    item_count: number;
    level_histogram: Record<string, number>;
    execution_accuracy: number;
    mean_bleu: number | null;
    mean_rouge_l: number | null;
  };
}

export interface IngestionReport {
  accepted: number;
  skipped_duplicate: number;
  skipped_non_select: number;
  parse_failures: number;
}

export interface ExportResponse {
  count: number;
  records: unknown[];
}

export type FeedbackKind =
  | 'rank'
  | 'edit'
  | 'discard'
  | 'refine'
  | 'flag'
  | 'reopen';
