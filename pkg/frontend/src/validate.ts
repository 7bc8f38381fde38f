// Client-side validation of the compose form. Mirrors the server's option
// invariants so most mistakes are caught before a request is made.

import { SOURCES, VALID_EMBEDDING_DIMS } from './types.js';

export interface ComposeForm {
  prompt: string;
  sources: string[];
  queryCount: number;
  dateStart: string;
  dateEnd: string;
  languages: string[];
  llmTemperature: number;
  embeddingModelId: string;
  embeddingDims: number;
}

export function validateCompose(form: ComposeForm): string[] {
  const problems: string[] = [];
  if (!form.prompt.trim()) {
    problems.push('Describe the topic you are searching for.');
  }
  if (form.sources.length === 0) {
    problems.push('Select at least one source.');
  }
  const unknown = form.sources.filter(
    (s) => !(SOURCES as readonly string[]).includes(s),
  );
  if (unknown.length > 0) {
    problems.push(`Unknown sources: ${unknown.join(', ')}.`);
  }
  if (!Number.isInteger(form.queryCount) || form.queryCount < 1) {
    problems.push('Query count must be a positive integer.');
  } else if (form.queryCount < form.sources.length) {
    problems.push(
      `Query count (${form.queryCount}) must cover every selected ` +
        `source (${form.sources.length}).`,
    );
  }
  if ((form.dateStart === '') !== (form.dateEnd === '')) {
    problems.push('Give both ends of the date range, or neither.');
  } else if (form.dateStart && form.dateEnd && form.dateStart > form.dateEnd) {
    problems.push('Date range start is after its end.');
  }
  if (!(form.llmTemperature >= 0 && form.llmTemperature <= 2)) {
    problems.push('Temperature must be between 0 and 2.');
  }
  if (!(VALID_EMBEDDING_DIMS as readonly number[]).includes(form.embeddingDims)) {
    problems.push(
      `Embedding dimensions must be one of ${VALID_EMBEDDING_DIMS.join(', ')}.`,
    );
  }
  return problems;
}

export function parseList(raw: string): string[] {
  return raw
    .split(',')
    .map((part) => part.trim())
    .filter((part) => part.length > 0);
}
