// Wire types, mirroring the service payloads exactly.

export interface HeatmapPayload {
  table_id: string;
  row_levels: number[];
  col_levels: number[];
  cell_levels: number[][];
  palette: string[];
}

export interface RankedTablePayload {
  table_id: string;
  rank: number;
  score: number;
  bm25_score: number;
  title: string;
  surrounding_text: string;
  header: string[];
  rows: string[][];
  heatmap: HeatmapPayload;
}

export interface CellAnswerPayload {
  table_id: string;
  row: number;
  col: number;
  value: string;
  score: number;
}

export interface SearchResultPayload {
  qid: string;
  tables: RankedTablePayload[];
  cells: CellAnswerPayload[];
  timings: Record<string, number>;
}

export interface TablePayload {
  id: string;
  title: string;
  surrounding_text: string;
  header: string[];
  rows: string[][];
}

export type Verdict = "correct" | "incorrect" | "partial";

export interface AnnotationPayload {
  qid: string;
  question: string;
  table_id: string;
  row?: number | null;
  col?: number | null;
  verdict: Verdict;
  note: string;
}

export interface AnnotationDraft {
  tableId: string;
  cell: { row: number; col: number } | null;
  verdict: Verdict | null;
  note: string;
}
