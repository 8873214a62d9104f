/** Field-level diffs between two runs: spec deltas, caption delta, and
 * per-component score deltas, each addressed by a dotted path.
 */

import type { SessionRun, ToneSpec } from './types.js';

export interface FieldDelta {
	path: string;
	a: unknown;
	b: unknown;
}

function isPlainObject(value: unknown): value is Record<string, unknown> {
	return typeof value === 'object' && value !== null && !Array.isArray(value);
}

export function deepDiff(a: unknown, b: unknown, path = ''): FieldDelta[] {
	if (isPlainObject(a) && isPlainObject(b)) {
		const keys = [...new Set([...Object.keys(a), ...Object.keys(b)])].sort();
		const deltas: FieldDelta[] = [];
		for (const key of keys) {
			const next = path ? `${path}.${key}` : key;
			deltas.push(...deepDiff(a[key], b[key], next));
		}
		return deltas;
	}
	if (Object.is(a, b) || JSON.stringify(a) === JSON.stringify(b)) return [];
	return [{ path: path || '$', a, b }];
}

export function diffSpecs(a: ToneSpec, b: ToneSpec): FieldDelta[] {
	return deepDiff(a, b);
}

export interface RunComparison {
	spec: FieldDelta[];
	caption: { a: string; b: string; changed: boolean };
	scores: FieldDelta[];
	stageDrafts: FieldDelta[];
}

export function diffRuns(a: SessionRun, b: SessionRun): RunComparison {
	return {
		spec: diffSpecs(a.spec, b.spec),
		caption: { a: a.final, b: b.final, changed: a.final !== b.final },
		scores: deepDiff(a.scores, b.scores),
		stageDrafts: deepDiff(
			{ stage1: a.stage1, stage2: a.stage2 },
			{ stage1: b.stage1, stage2: b.stage2 },
		),
	};
}
