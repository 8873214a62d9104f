/** Local run history: append-only, immutable entries, exportable as JSON.
 * Backed by localStorage in the browser; falls back to memory (e.g. tests).
 */

import type { SessionRun } from './types.js';
import { deepFreeze } from './api.js';

export interface StorageLike {
	getItem(key: string): string | null;
	setItem(key: string, value: string): void;
	removeItem(key: string): void;
}

const STORAGE_KEY = 'tonecap-studio-history';

export interface HistoryStore {
	list(): readonly SessionRun[];
	get(id: string): SessionRun | undefined;
	append(run: Omit<SessionRun, 'id' | 'timestamp'>): SessionRun;
	exportJson(): string;
	clear(): void;
}

class MemoryStorage implements StorageLike {
	private map = new Map<string, string>();
	getItem(key: string): string | null {
		return this.map.get(key) ?? null;
	}
	setItem(key: string, value: string): void {
		this.map.set(key, value);
	}
	removeItem(key: string): void {
		this.map.delete(key);
	}
}

function defaultStorage(): StorageLike {
	try {
		if (typeof localStorage !== 'undefined') return localStorage;
	} catch {
		// no DOM storage available
	}
	return new MemoryStorage();
}

export function createHistory(
	storage: StorageLike = defaultStorage(),
	now: () => Date = () => new Date(),
): HistoryStore {
	let runs: SessionRun[] = load();

	function load(): SessionRun[] {
		const raw = storage.getItem(STORAGE_KEY);
		if (!raw) return [];
		try {
			const parsed = JSON.parse(raw) as SessionRun[];
			return parsed.map((r) => deepFreeze(r));
		} catch {
			return [];
		}
	}

	function persist(): void {
		storage.setItem(STORAGE_KEY, JSON.stringify(runs));
	}

	return {
		list(): readonly SessionRun[] {
			return runs.slice();
		},
		get(id: string): SessionRun | undefined {
			return runs.find((r) => r.id === id);
		},
		append(run): SessionRun {
			const stamp = now();
			const entry = deepFreeze<SessionRun>({
				...structuredClone(run),
				id: `run-${stamp.getTime()}-${runs.length + 1}`,
				timestamp: stamp.toISOString(),
			});
			runs = [...runs, entry];
			persist();
			return entry;
		},
		exportJson(): string {
			return JSON.stringify(runs, null, 2);
		},
		clear(): void {
			runs = [];
			storage.removeItem(STORAGE_KEY);
		},
	};
}
