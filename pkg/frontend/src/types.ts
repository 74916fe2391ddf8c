/** Wire types of the questionnaire service protocol. */

export type Favored = "left" | "right" | "none";

export interface ScaleCell {
  position: number;
  intensity: number;
  favored: Favored;
}

export interface StudyDoc {
  name: string;
  factors: { name: string; levels: string[] }[];
  profiles: { label: string; levels: Record<string, string>; asset: string | null }[];
  scale: ScaleCell[];
}

export interface SessionCreated {
  session_id: string;
  state: string;
  total_pairs: number;
  seed: number;
}

export interface PairSide {
  label: string;
  asset: string | null;
}

export interface NextPair {
  state: string;
  pair: { pair_index: number; left: PairSide; right: PairSide } | null;
  scale?: ScaleCell[];
  progress: { answered: number; total: number };
}

export interface InconsistentPair {
  left: string;
  right: string;
  misfit: number;
}

export interface SessionStatus {
  session_id: string;
  state: string;
  answered: number;
  total: number;
  transitivity_violations?: number;
  weights?: Record<string, number>;
  cr?: number;
  cr_guideline?: number;
  above_guideline?: boolean;
  inconsistent_pairs?: InconsistentPair[];
}

export interface ServiceError {
  code: string;
  message: string;
  detail?: unknown;
}

export interface ExportDoc {
  judgments_csv: string;
  weights_csv: string;
  sessions: string[];
  skipped: string[];
}
