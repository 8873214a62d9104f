/** Wire types shared with the service. Key names are part of the contract. */

export type YesNo = 'yes' | 'no';

export const STRUCTURAL_LABELS = [
	'User Mentions',
	'Hashtags',
	'Emojis',
	'Date/Time',
	'Location',
	'First-Person Perspective',
] as const;

export type StructuralLabel = (typeof STRUCTURAL_LABELS)[number];

export type StructuralAttributes = Record<StructuralLabel, YesNo>;

export interface ToneSpec {
	'Personality': Record<string, number>;
	'Writing Style': Record<string, number>;
	'Informativeness': number;
	'Structural Attributes': StructuralAttributes;
	'word_count': number;
}

export interface GenerateRequest {
	summary: string;
	spec: ToneSpec;
	mode: string;
	n?: number;
}

export interface ScoreReport {
	s_p: number | null;
	s_w: number | null;
	nas: number;
	e_i: number;
	e_len: number;
	attr_errors: Record<string, number>;
	sas: number;
	tas: number;
	fc: number;
	overall: number;
}

export interface GenerateResponse {
	final: string;
	stage1: string | null;
	stage2: string | null;
	scores: ScoreReport;
	provenance: unknown;
}

export interface Inventory {
	personality_traits: string[];
	writing_styles: string[];
}

/** One completed generation, as stored in the local history. */
export interface SessionRun {
	id: string;
	timestamp: string;
	summary: string;
	/** Exactly the spec object that went out in the request body. */
	spec: ToneSpec;
	mode: string;
	n: number;
	final: string;
	stage1: string | null;
	stage2: string | null;
	scores: ScoreReport;
	notes: string;
}

export const GENERATION_MODES = [
	'two_stage',
	'order_reversed',
	'single_stage',
	'style_only',
	'personality_only',
] as const;
