/** JSON shapes of the query API. Field names mirror the server exactly. */

export interface DatasetDescriptor {
  dataset_id: string;
  name: string;
  k: number;
  n: number;
  created_at: string;
  totals: { correct: number; misclassified: number };
}

export interface ClassSummaryRow {
  class_id: number;
  label: string;
  support: number;
  correct: number;
  outbound: number;
  inbound: number;
  mean_max_pred: number;
  is_empty: boolean;
}

export interface OverviewEntry {
  summary: ClassSummaryRow;
  histogram: number[];
}

export interface OverviewPayload {
  bins: number;
  classes: OverviewEntry[];
}

export interface WindowInstanceRow {
  instance_id: string;
  true_class: number;
  values: number[];
  color_group: number;
}

export interface WindowPayload {
  from: number;
  to: number;
  total_matching: number;
  instances: WindowInstanceRow[];
  doughnuts: ClassSummaryRow[];
}

export interface ChordNode {
  class_id: number;
  label: string;
  outbound_within: number;
  inbound_within: number;
}

export interface ChordPayload {
  classes: number[];
  nodes: ChordNode[];
  flows: number[][];
  examples: Record<string, string[]>;
}

export interface InstanceDetail {
  instance_id: string;
  true_class: number;
  label: string;
  hierarchy: string[];
  predicted_class: number;
  max_pred: number;
  probs: number[];
  image_url: string;
}

export interface ApiErrorBody {
  error: { code: string; message: string; line?: number };
}
