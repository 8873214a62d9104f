/** The spec draft the controls edit, and its canonical wire form.
 *
 * Drafts are never mutated in place: every setter returns a fresh draft, so
 * a run's captured spec can never change after the fact. composeSpec emits
 * attribute maps with sorted keys, which makes request bodies comparable
 * field-by-field across runs.
 */

import type { Inventory, StructuralAttributes, ToneSpec } from './types.js';
import { STRUCTURAL_LABELS } from './types.js';

export interface StructuralDraft {
	userMentions: boolean;
	hashtags: boolean;
	emojis: boolean;
	dateTime: boolean;
	location: boolean;
	firstPerson: boolean;
}

export interface SpecDraft {
	personality: Record<string, number>;
	writingStyle: Record<string, number>;
	informativeness: number;
	wordCount: number;
	structural: StructuralDraft;
}

const DRAFT_TO_LABEL: Record<keyof StructuralDraft, (typeof STRUCTURAL_LABELS)[number]> = {
	userMentions: 'User Mentions',
	hashtags: 'Hashtags',
	emojis: 'Emojis',
	dateTime: 'Date/Time',
	location: 'Location',
	firstPerson: 'First-Person Perspective',
};

export function emptyDraft(): SpecDraft {
	return {
		personality: {},
		writingStyle: {},
		informativeness: 0.5,
		wordCount: 17,
		structural: {
			userMentions: false,
			hashtags: false,
			emojis: false,
			dateTime: false,
			location: false,
			firstPerson: false,
		},
	};
}

export function setTrait(draft: SpecDraft, name: string, value: number): SpecDraft {
	return { ...draft, personality: { ...draft.personality, [name]: value } };
}

export function removeTrait(draft: SpecDraft, name: string): SpecDraft {
	const next = { ...draft.personality };
	delete next[name];
	return { ...draft, personality: next };
}

export function setStyle(draft: SpecDraft, name: string, value: number): SpecDraft {
	return { ...draft, writingStyle: { ...draft.writingStyle, [name]: value } };
}

export function removeStyle(draft: SpecDraft, name: string): SpecDraft {
	const next = { ...draft.writingStyle };
	delete next[name];
	return { ...draft, writingStyle: next };
}

export function setInformativeness(draft: SpecDraft, value: number): SpecDraft {
	return { ...draft, informativeness: value };
}

export function setWordCount(draft: SpecDraft, value: number): SpecDraft {
	return { ...draft, wordCount: value };
}

export function toggleStructural(draft: SpecDraft, key: keyof StructuralDraft): SpecDraft {
	return { ...draft, structural: { ...draft.structural, [key]: !draft.structural[key] } };
}

function sortedMap(map: Record<string, number>): Record<string, number> {
	const out: Record<string, number> = {};
	for (const key of Object.keys(map).sort()) out[key] = map[key];
	return out;
}

/** The exact JSON object sent as the request's `spec` field. */
export function composeSpec(draft: SpecDraft): ToneSpec {
	const structural = {} as StructuralAttributes;
	for (const [key, label] of Object.entries(DRAFT_TO_LABEL)) {
		structural[label] = draft.structural[key as keyof StructuralDraft] ? 'yes' : 'no';
	}
	return {
		'Personality': sortedMap(draft.personality),
		'Writing Style': sortedMap(draft.writingStyle),
		'Informativeness': draft.informativeness,
		'Structural Attributes': structural,
		'word_count': draft.wordCount,
	};
}

/** Client-side mirror of the backend validation rules. [] means valid. */
export function validateDraft(draft: SpecDraft, inventory: Inventory | null): string[] {
	const errors: string[] = [];
	const traitSet = inventory ? new Set(inventory.personality_traits) : null;
	const styleSet = inventory ? new Set(inventory.writing_styles) : null;

	for (const [name, value] of Object.entries(draft.personality)) {
		if (traitSet && !traitSet.has(name)) errors.push(`unknown personality trait: ${name}`);
		if (!(value >= 0 && value <= 1)) errors.push(`personality ${name} intensity outside [0, 1]`);
	}
	for (const [name, value] of Object.entries(draft.writingStyle)) {
		if (styleSet && !styleSet.has(name)) errors.push(`unknown writing style: ${name}`);
		if (!(value >= 0 && value <= 1)) errors.push(`writing style ${name} intensity outside [0, 1]`);
	}
	if (!(draft.informativeness >= 0 && draft.informativeness <= 1)) {
		errors.push('informativeness must be in [0, 1]');
	}
	if (!Number.isInteger(draft.wordCount) || draft.wordCount < 1) {
		errors.push('word count must be an integer >= 1');
	}
	return errors;
}
