/** Minimal JSON-schema checker covering the subset the shared schema uses:
 * type, required, properties, additionalProperties, enum, minimum, minLength,
 * and "integer". Every outgoing /api/generate body must pass before sending.
 */

import generateRequestSchema from '../schema/generate-request.schema.json' with { type: 'json' };

type Schema = {
	type?: string;
	required?: string[];
	properties?: Record<string, Schema>;
	additionalProperties?: boolean | Schema;
	enum?: unknown[];
	minimum?: number;
	maximum?: number;
	minLength?: number;
};

export { generateRequestSchema };

export function schemaErrors(value: unknown, schema: Schema, path = '$'): string[] {
	const errors: string[] = [];

	if (schema.enum && !schema.enum.some((v) => v === value)) {
		errors.push(`${path}: not one of ${JSON.stringify(schema.enum)}`);
		return errors;
	}

	switch (schema.type) {
		case 'string': {
			if (typeof value !== 'string') return [`${path}: expected string`];
			if (schema.minLength !== undefined && value.length < schema.minLength) {
				errors.push(`${path}: shorter than ${schema.minLength}`);
			}
			return errors;
		}
		case 'number':
		case 'integer': {
			if (typeof value !== 'number' || Number.isNaN(value)) return [`${path}: expected number`];
			if (schema.type === 'integer' && !Number.isInteger(value)) {
				errors.push(`${path}: expected integer`);
			}
			if (schema.minimum !== undefined && value < schema.minimum) {
				errors.push(`${path}: below minimum ${schema.minimum}`);
			}
			if (schema.maximum !== undefined && value > schema.maximum) {
				errors.push(`${path}: above maximum ${schema.maximum}`);
			}
			return errors;
		}
		case 'object': {
			if (typeof value !== 'object' || value === null || Array.isArray(value)) {
				return [`${path}: expected object`];
			}
			const obj = value as Record<string, unknown>;
			for (const key of schema.required ?? []) {
				if (!(key in obj)) errors.push(`${path}: missing required ${key}`);
			}
			const props = schema.properties ?? {};
			for (const [key, child] of Object.entries(obj)) {
				if (key in props) {
					errors.push(...schemaErrors(child, props[key], `${path}.${key}`));
				} else if (schema.additionalProperties === false) {
					errors.push(`${path}: unexpected property ${key}`);
				} else if (typeof schema.additionalProperties === 'object') {
					errors.push(...schemaErrors(child, schema.additionalProperties, `${path}.${key}`));
				}
			}
			return errors;
		}
		default:
			return errors;
	}
}

export function assertValidGenerateBody(body: unknown): void {
	const errors = schemaErrors(body, generateRequestSchema as Schema);
	if (errors.length) {
		throw new Error(`request body fails the shared schema: ${errors.join('; ')}`);
	}
}
