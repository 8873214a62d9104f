/** DOM wiring for the studio: compose a spec with live bin labels, generate,
 * inspect stage drafts and scores, and diff any two history entries.
 */

import { StudioClient, ServiceError } from './api.js';
import { informativenessLabel, intensityLabel } from './bins.js';
import { diffRuns } from './diff.js';
import { createHistory } from './history.js';
import {
	SpecDraft,
	StructuralDraft,
	composeSpec,
	emptyDraft,
	removeStyle,
	removeTrait,
	setInformativeness,
	setStyle,
	setTrait,
	setWordCount,
	toggleStructural,
	validateDraft,
} from './specState.js';
import type { Inventory, SessionRun } from './types.js';
import { GENERATION_MODES } from './types.js';

const $ = <T extends HTMLElement>(selector: string): T => {
	const node = document.querySelector(selector);
	if (!node) throw new Error(`missing element ${selector}`);
	return node as T;
};

const STRUCTURAL_CONTROLS: Array<[keyof StructuralDraft, string]> = [
	['hashtags', 'Hashtags'],
	['emojis', 'Emojis'],
	['userMentions', 'User Mentions'],
	['location', 'Location'],
	['dateTime', 'Date/Time'],
	['firstPerson', 'First-Person'],
];

interface AppState {
	draft: SpecDraft;
	inventory: Inventory | null;
	selected: string[];
	lastError: string | null;
}

export function startApp(baseUrl: string): void {
	const client = new StudioClient(baseUrl);
	const history = createHistory();
	const state: AppState = { draft: emptyDraft(), inventory: null, selected: [], lastError: null };

	const banner = $('#banner');
	const traitList = $('#trait-list');
	const styleList = $('#style-list');
	const traitSearch = $<HTMLInputElement>('#trait-search');
	const styleSearch = $<HTMLInputElement>('#style-search');
	const structuralBox = $('#structural');
	const wordCount = $<HTMLInputElement>('#word-count');
	const wordCountError = $('#word-count-error');
	const informativeness = $<HTMLInputElement>('#informativeness');
	const informativenessOut = $('#informativeness-label');
	const summaryBox = $<HTMLTextAreaElement>('#summary');
	const modeSelect = $<HTMLSelectElement>('#mode');
	const nInput = $<HTMLInputElement>('#n');
	const generateBtn = $<HTMLButtonElement>('#generate');
	const resultBox = $('#result');
	const historyBox = $('#history');
	const diffBox = $('#diff');
	const exportBtn = $<HTMLButtonElement>('#export');

	for (const mode of GENERATION_MODES) {
		const option = document.createElement('option');
		option.value = mode;
		option.textContent = mode;
		modeSelect.append(option);
	}

	function setDraft(next: SpecDraft): void {
		state.draft = next;
		renderControls();
	}

	function showError(message: string | null): void {
		state.lastError = message;
		banner.textContent = message ?? '';
		banner.classList.toggle('visible', message !== null);
	}

	function sliderRow(
		name: string,
		value: number,
		onChange: (v: number) => void,
		onRemove: () => void,
	): HTMLElement {
		const row = document.createElement('div');
		row.className = 'slider-row';
		const label = document.createElement('span');
		label.className = 'attr-name';
		label.textContent = name;
		const slider = document.createElement('input');
		slider.type = 'range';
		slider.min = '0';
		slider.max = '1';
		slider.step = '0.01';
		slider.value = String(value);
		const bin = document.createElement('span');
		bin.className = 'bin-label';
		bin.textContent = intensityLabel(value);
		slider.addEventListener('input', () => {
			const v = Number(slider.value);
			bin.textContent = intensityLabel(v);
			onChange(v);
		});
		const remove = document.createElement('button');
		remove.textContent = '×';
		remove.title = `remove ${name}`;
		remove.addEventListener('click', onRemove);
		row.append(label, slider, bin, remove);
		return row;
	}

	function renderPicker(
		container: HTMLElement,
		search: HTMLInputElement,
		names: string[],
		chosen: Record<string, number>,
		add: (name: string) => void,
	): void {
		const results = container.querySelector('.picker-results') as HTMLElement;
		results.replaceChildren();
		const query = search.value.trim().toLowerCase();
		if (!query) return;
		const matches = names
			.filter((n) => n.toLowerCase().includes(query) && !(n in chosen))
			.slice(0, 8);
		for (const name of matches) {
			const item = document.createElement('button');
			item.className = 'picker-item';
			item.textContent = name;
			item.addEventListener('click', () => {
				add(name);
				search.value = '';
				renderControls();
			});
			results.append(item);
		}
	}

	function renderControls(): void {
		const { draft, inventory } = state;

		const traitRows = traitList.querySelector('.rows') as HTMLElement;
		traitRows.replaceChildren(
			...Object.entries(draft.personality).map(([name, value]) =>
				sliderRow(
					name,
					value,
					(v) => setDraft(setTrait(state.draft, name, v)),
					() => setDraft(removeTrait(state.draft, name)),
				),
			),
		);
		const styleRows = styleList.querySelector('.rows') as HTMLElement;
		styleRows.replaceChildren(
			...Object.entries(draft.writingStyle).map(([name, value]) =>
				sliderRow(
					name,
					value,
					(v) => setDraft(setStyle(state.draft, name, v)),
					() => setDraft(removeStyle(state.draft, name)),
				),
			),
		);
		if (inventory) {
			renderPicker(traitList, traitSearch, inventory.personality_traits, draft.personality, (n) =>
				setDraft(setTrait(state.draft, n, 0.5)),
			);
			renderPicker(styleList, styleSearch, inventory.writing_styles, draft.writingStyle, (n) =>
				setDraft(setStyle(state.draft, n, 0.5)),
			);
		}

		structuralBox.replaceChildren(
			...STRUCTURAL_CONTROLS.map(([key, label]) => {
				const wrap = document.createElement('label');
				wrap.className = 'toggle';
				const box = document.createElement('input');
				box.type = 'checkbox';
				box.checked = state.draft.structural[key];
				box.addEventListener('change', () => setDraft(toggleStructural(state.draft, key)));
				wrap.append(box, document.createTextNode(` ${label}`));
				return wrap;
			}),
		);

		informativeness.value = String(draft.informativeness);
		informativenessOut.textContent = informativenessLabel(draft.informativeness);
		wordCount.value = String(draft.wordCount);

		const errors = validateDraft(draft, inventory);
		wordCountError.textContent = errors.find((e) => e.includes('word count')) ?? '';
		generateBtn.disabled =
			errors.length > 0 || client.busy || summaryBox.value.trim().length === 0;
		generateBtn.title = errors.join('; ');
	}

	function scoreTable(scores: SessionRun['scores']): string {
		const pct = (x: number | null) => (x === null ? '—' : (x * 100).toFixed(1));
		return `
			<table><tr>
				<th>P</th><th>WS</th><th>NAS</th><th>SAS</th><th>TAS</th><th>FC</th><th>Overall</th>
			</tr><tr>
				<td>${pct(scores.s_p)}</td><td>${pct(scores.s_w)}</td><td>${pct(scores.nas)}</td>
				<td>${pct(scores.sas)}</td><td>${pct(scores.tas)}</td><td>${pct(scores.fc)}</td>
				<td><b>${pct(scores.overall)}</b></td>
			</tr></table>`;
	}

	function renderResult(run: SessionRun): void {
		resultBox.innerHTML = `
			<h3>final caption</h3>
			<p class="caption">${run.final}</p>
			<details open><summary>stage drafts</summary>
				<p><b>stage 1</b>: ${run.stage1 ?? '—'}</p>
				<p><b>stage 2</b>: ${run.stage2 ?? '—'}</p>
			</details>
			${scoreTable(run.scores)}`;
	}

	function renderHistory(): void {
		const runs = history.list();
		historyBox.replaceChildren(
			...runs
				.slice()
				.reverse()
				.map((run) => {
					const row = document.createElement('div');
					row.className = 'history-row';
					const pick = document.createElement('input');
					pick.type = 'checkbox';
					pick.checked = state.selected.includes(run.id);
					pick.addEventListener('change', () => {
						state.selected = pick.checked
							? [...state.selected, run.id].slice(-2)
							: state.selected.filter((id) => id !== run.id);
						renderHistory();
						renderDiff();
					});
					const label = document.createElement('span');
					label.textContent = `${run.timestamp.slice(11, 19)}  ${(run.scores.overall * 100).toFixed(1)}  ${run.final.slice(0, 60)}`;
					label.addEventListener('click', () => renderResult(run));
					row.append(pick, label);
					return row;
				}),
		);
	}

	function renderDiff(): void {
		if (state.selected.length !== 2) {
			diffBox.innerHTML = '<p class="hint">select two runs to compare</p>';
			return;
		}
		const [a, b] = state.selected.map((id) => history.get(id)!).filter(Boolean);
		if (!a || !b) return;
		const cmp = diffRuns(a, b);
		const rows = cmp.spec
			.map((d) => `<tr><td>${d.path}</td><td>${JSON.stringify(d.a)}</td><td>${JSON.stringify(d.b)}</td></tr>`)
			.join('');
		const scoreRows = cmp.scores
			.filter((d) => !d.path.startsWith('attr_errors'))
			.map((d) => `<tr><td>${d.path}</td><td>${fmt(d.a)}</td><td>${fmt(d.b)}</td></tr>`)
			.join('');
		diffBox.innerHTML = `
			<h3>spec delta (${cmp.spec.length} field${cmp.spec.length === 1 ? '' : 's'})</h3>
			<table><tr><th>field</th><th>run A</th><th>run B</th></tr>${rows || '<tr><td colspan="3">identical specs</td></tr>'}</table>
			<h3>captions</h3>
			<p><b>A</b>: ${cmp.caption.a}</p><p><b>B</b>: ${cmp.caption.b}</p>
			<h3>score delta</h3>
			<table><tr><th>component</th><th>A</th><th>B</th></tr>${scoreRows || '<tr><td colspan="3">identical scores</td></tr>'}</table>`;
	}

	const fmt = (x: unknown) => (typeof x === 'number' ? x.toFixed(4) : JSON.stringify(x));

	generateBtn.addEventListener('click', async () => {
		showError(null);
		renderControls();
		try {
			const request = {
				summary: summaryBox.value.trim(),
				spec: composeSpec(state.draft),
				mode: modeSelect.value,
				n: Math.max(1, Number(nInput.value) || 2),
			};
			generateBtn.disabled = true;
			const { response, sent } = await client.generate(request);
			const run = history.append({
				summary: sent.summary,
				spec: sent.spec,
				mode: sent.mode,
				n: sent.n ?? 2,
				final: response.final,
				stage1: response.stage1,
				stage2: response.stage2,
				scores: response.scores,
				notes: '',
			});
			renderResult(run);
			renderHistory();
		} catch (error) {
			if (error instanceof ServiceError) {
				showError(`${error.component}: ${error.message} (${error.code})`);
			} else {
				showError(String(error));
			}
		} finally {
			renderControls();
		}
	});

	exportBtn.addEventListener('click', () => {
		const blob = new Blob([history.exportJson()], { type: 'application/json' });
		const link = document.createElement('a');
		link.href = URL.createObjectURL(blob);
		link.download = 'tonecap-history.json';
		link.click();
		URL.revokeObjectURL(link.href);
	});

	informativeness.addEventListener('input', () =>
		setDraft(setInformativeness(state.draft, Number(informativeness.value))),
	);
	wordCount.addEventListener('input', () =>
		setDraft(setWordCount(state.draft, Number(wordCount.value))),
	);
	summaryBox.addEventListener('input', renderControls);
	traitSearch.addEventListener('input', renderControls);
	styleSearch.addEventListener('input', renderControls);

	void (async () => {
		if (!(await client.health())) {
			showError(`service unreachable at ${baseUrl} — start it with: tonecap serve`);
		}
		try {
			state.inventory = await client.inventory();
		} catch (error) {
			showError(String(error));
		}
		renderControls();
		renderHistory();
		renderDiff();
	})();
}
