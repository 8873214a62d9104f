/** Recorded-request contract: toggling exactly one control between two runs
 * must produce outgoing /api/generate bodies that differ in exactly that
 * field. Requests are captured by a mock server (fetch stub) and diffed.
 */

import { describe, expect, it } from 'vitest';

import { StudioClient } from '../src/api.js';
import { deepDiff } from '../src/diff.js';
import {
	composeSpec,
	emptyDraft,
	setInformativeness,
	setStyle,
	setTrait,
	setWordCount,
	toggleStructural,
} from '../src/specState.js';
import type { GenerateRequest } from '../src/types.js';

const RESPONSE = {
	final: 'caption',
	stage1: 'draft one',
	stage2: 'draft two',
	scores: {
		s_p: 1, s_w: 1, nas: 1, e_i: 0, e_len: 0,
		attr_errors: {}, sas: 1, tas: 1, fc: 1, overall: 1,
	},
	provenance: {},
};

function mockServer() {
	const recorded: GenerateRequest[] = [];
	const fetchImpl = (async (_url: RequestInfo | URL, init?: RequestInit) => {
		recorded.push(JSON.parse(String(init?.body)) as GenerateRequest);
		return new Response(JSON.stringify(RESPONSE), {
			status: 200,
			headers: { 'content-type': 'application/json' },
		});
	}) as typeof fetch;
	return { recorded, client: new StudioClient('http://mock', fetchImpl) };
}

function baseDraft() {
	let draft = emptyDraft();
	draft = setTrait(draft, 'Anxious', 0.8);
	draft = setStyle(draft, 'Conversational', 0.75);
	draft = setInformativeness(draft, 0.4);
	draft = setWordCount(draft, 17);
	return draft;
}

async function send(client: StudioClient, draft: ReturnType<typeof baseDraft>) {
	await client.generate({
		summary: 'A car pulled out and nearly hit a cyclist.',
		spec: composeSpec(draft),
		mode: 'two_stage',
		n: 2,
	});
}

describe('single-field delta contract', () => {
	it('toggling Hashtags only changes exactly that field', async () => {
		const { recorded, client } = mockServer();
		const draft = baseDraft();
		await send(client, draft);
		await send(client, toggleStructural(draft, 'hashtags'));

		expect(recorded).toHaveLength(2);
		const deltas = deepDiff(recorded[0], recorded[1]);
		expect(deltas).toHaveLength(1);
		expect(deltas[0].path).toBe('spec.Structural Attributes.Hashtags');
		expect(deltas[0].a).toBe('no');
		expect(deltas[0].b).toBe('yes');
	});

	it('moving one trait slider only changes that trait', async () => {
		const { recorded, client } = mockServer();
		const draft = baseDraft();
		await send(client, draft);
		await send(client, setTrait(draft, 'Anxious', 0.3));

		const deltas = deepDiff(recorded[0], recorded[1]);
		expect(deltas).toHaveLength(1);
		expect(deltas[0].path).toBe('spec.Personality.Anxious');
	});

	it('changing the word count only changes word_count', async () => {
		const { recorded, client } = mockServer();
		const draft = baseDraft();
		await send(client, draft);
		await send(client, setWordCount(draft, 24));

		const deltas = deepDiff(recorded[0], recorded[1]);
		expect(deltas).toHaveLength(1);
		expect(deltas[0].path).toBe('spec.word_count');
	});

	it('adding a style is a single new field', async () => {
		const { recorded, client } = mockServer();
		const draft = baseDraft();
		await send(client, draft);
		await send(client, setStyle(draft, 'Advisory', 0.6));

		const deltas = deepDiff(recorded[0], recorded[1]);
		expect(deltas).toHaveLength(1);
		expect(deltas[0].path).toBe('spec.Writing Style.Advisory');
		expect(deltas[0].a).toBeUndefined();
	});

	it('identical drafts produce byte-identical bodies', async () => {
		const { recorded, client } = mockServer();
		const draft = baseDraft();
		await send(client, draft);
		await send(client, baseDraft());
		expect(JSON.stringify(recorded[0])).toBe(JSON.stringify(recorded[1]));
	});
});

describe('client invariants', () => {
	it('rejects a second generation while one is in flight', async () => {
		let release: (value: Response) => void = () => {};
		const gate = new Promise<Response>((resolve) => (release = resolve));
		const fetchImpl = (async () => gate) as typeof fetch;
		const client = new StudioClient('http://mock', fetchImpl);

		const body = {
			summary: 's',
			spec: composeSpec(baseDraft()),
			mode: 'two_stage' as const,
		};
		const first = client.generate(body);
		await expect(client.generate(body)).rejects.toThrow(/in flight/);
		release(new Response(JSON.stringify(RESPONSE), { status: 200 }));
		await first;
	});

	it('freezes the sent spec snapshot', async () => {
		const { client } = mockServer();
		const draft = baseDraft();
		const { sent } = await client.generate({
			summary: 's',
			spec: composeSpec(draft),
			mode: 'two_stage',
		});
		expect(Object.isFrozen(sent)).toBe(true);
		expect(Object.isFrozen(sent.spec)).toBe(true);
		expect(() => {
			(sent.spec as { word_count: number }).word_count = 99;
		}).toThrow();
	});

	it('schema-validates outgoing bodies before sending', async () => {
		const { recorded, client } = mockServer();
		const bad = {
			summary: '',
			spec: composeSpec(baseDraft()),
			mode: 'two_stage' as const,
		};
		await expect(client.generate(bad)).rejects.toThrow(/shared schema/);
		expect(recorded).toHaveLength(0);
	});

	it('surfaces service errors with their component tag', async () => {
		const fetchImpl = (async () =>
			new Response(
				JSON.stringify({ code: 'provider_error', message: 'backend down', component: 'generation' }),
				{ status: 502 },
			)) as typeof fetch;
		const client = new StudioClient('http://mock', fetchImpl);
		await expect(
			client.generate({ summary: 's', spec: composeSpec(baseDraft()), mode: 'two_stage' }),
		).rejects.toMatchObject({ component: 'generation', code: 'provider_error', status: 502 });
	});
});
