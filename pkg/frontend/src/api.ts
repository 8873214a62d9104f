/** HTTP client for the captioning service. One generation in flight at a time;
 * outgoing bodies are schema-validated and the stored copies deep-frozen.
 */

import type { GenerateRequest, GenerateResponse, Inventory } from './types.js';
import { assertValidGenerateBody } from './validate.js';

export class ServiceError extends Error {
	constructor(
		message: string,
		public readonly code: string,
		public readonly component: string,
		public readonly status: number,
	) {
		super(`[${component}] ${message}`);
	}
}

export function deepFreeze<T>(value: T): T {
	if (value && typeof value === 'object') {
		for (const child of Object.values(value as object)) deepFreeze(child);
		Object.freeze(value);
	}
	return value;
}

async function toServiceError(response: Response): Promise<ServiceError> {
	let code = 'internal';
	let message = response.statusText;
	let component = 'service';
	try {
		const body = await response.json();
		code = body.code ?? code;
		message = body.message ?? message;
		component = body.component ?? component;
	} catch {
		// non-JSON error body: keep the defaults
	}
	return new ServiceError(message, code, component, response.status);
}

export class StudioClient {
	private inflight = false;

	constructor(
		public readonly baseUrl: string,
		private readonly fetchImpl: typeof fetch = fetch,
	) {}

	get busy(): boolean {
		return this.inflight;
	}

	async inventory(): Promise<Inventory> {
		const response = await this.fetchImpl(`${this.baseUrl}/api/inventory`);
		if (!response.ok) throw await toServiceError(response);
		return (await response.json()) as Inventory;
	}

	async health(): Promise<boolean> {
		try {
			const response = await this.fetchImpl(`${this.baseUrl}/healthz`);
			return response.ok;
		} catch {
			return false;
		}
	}

	/** POST /api/generate. Returns the response plus the frozen body snapshot
	 * that actually went over the wire. */
	async generate(request: GenerateRequest): Promise<{ response: GenerateResponse; sent: GenerateRequest }> {
		if (this.inflight) {
			throw new Error('a generation is already in flight');
		}
		const sent = deepFreeze(structuredClone(request));
		assertValidGenerateBody(sent);
		this.inflight = true;
		try {
			const response = await this.fetchImpl(`${this.baseUrl}/api/generate`, {
				method: 'POST',
				headers: { 'content-type': 'application/json' },
				body: JSON.stringify(sent),
			});
			if (!response.ok) throw await toServiceError(response);
			return { response: (await response.json()) as GenerateResponse, sent };
		} finally {
			this.inflight = false;
		}
	}
}
