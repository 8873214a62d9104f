/** Intensity bins mirrored from the backend: half-open [lo, hi), top closed.
 * The label fixture under tests/fixtures is generated by the backend's bin
 * mapper, so drift between the two implementations fails the test suite.
 */

export interface Bin {
	label: string;
	display: string;
	lo: number;
	hi: number;
	index: number;
}

const EDGES = [0.0, 0.2, 0.4, 0.6, 0.8, 1.0];

function makeBins(names: Array<[string, string]>): Bin[] {
	return names.map(([label, display], i) => ({
		label,
		display,
		lo: EDGES[i],
		hi: EDGES[i + 1],
		index: i,
	}));
}

export const INTENSITY_BINS: Bin[] = makeBins([
	['Absent', 'Absent'],
	['Subtle', 'Subtle'],
	['Moderate', 'Moderate'],
	['Strong', 'Strong'],
	['VeryStrong', 'Very Strong'],
]);

export const INFORMATIVENESS_BINS: Bin[] = makeBins([
	['Negligible', 'Negligible'],
	['Minimal', 'Minimal'],
	['Moderate', 'Moderate'],
	['High', 'High'],
	['Extensive', 'Extensive'],
]);

function binFor(x: number, bins: Bin[]): Bin {
	if (!Number.isFinite(x) || x < 0 || x > 1) {
		throw new RangeError(`intensity ${x} outside [0, 1]`);
	}
	for (const bin of bins.slice(0, -1)) {
		if (x >= bin.lo && x < bin.hi) return bin;
	}
	return bins[bins.length - 1];
}

export function binForIntensity(x: number): Bin {
	return binFor(x, INTENSITY_BINS);
}

export function binForInformativeness(x: number): Bin {
	return binFor(x, INFORMATIVENESS_BINS);
}

export function intensityLabel(x: number): string {
	return binForIntensity(x).display;
}

export function informativenessLabel(x: number): string {
	return binForInformativeness(x).display;
}
