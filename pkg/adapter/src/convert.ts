/**
 * Turn parsed CoNLL-U sentences into interchange documents:
 *
 *   {"doc_id": ..., "sentences": [{"tokens": [...], "mentions":
 *     [{"entity": ..., "role": "s"|"o", "token_index": ...}]}]}
 *
 * A token becomes a subject mention when its relation starts with
 * "nsubj" (passive subjects included) and an object mention when the
 * relation's base is obj, dobj or iobj. Entity keys are lowercased
 * lemmas, falling back to the surface form when the lemma is missing;
 * surface mode always keys by the form.
 */

import { ConlluSentence, parseConllu } from './conllu.js'

export interface Mention {
  entity: string
  role: 's' | 'o'
  token_index: number
}

export interface InterchangeSentence {
  tokens: string[]
  mentions: Mention[]
}

export interface InterchangeDocument {
  doc_id: string
  sentences: InterchangeSentence[]
}

export interface ConvertOptions {
  /** key entities by surface form instead of lemma */
  surface?: boolean
  /** doc_id used when the input has no "# newdoc id" markers */
  fallbackDocId?: string
  /** receives a message when the fallback document is used */
  warn?: (message: string) => void
}

const OBJECT_RELATIONS = new Set(['obj', 'dobj', 'iobj'])

export function mentionRole(deprel: string): 's' | 'o' | undefined {
  if (deprel.startsWith('nsubj')) {
    return 's'
  }
  const base = deprel.split(':', 1)[0]
  return OBJECT_RELATIONS.has(base) ? 'o' : undefined
}

export function entityKey(
  form: string,
  lemma: string,
  surface: boolean,
): string {
  if (!surface && lemma !== '' && lemma !== '_') {
    return lemma.toLowerCase()
  }
  return form.toLowerCase()
}

function toSentence(sentence: ConlluSentence, surface: boolean): InterchangeSentence {
  const tokens = sentence.tokens.map((t) => t.form)
  const mentions: Mention[] = []
  for (const token of sentence.tokens) {
    const role = mentionRole(token.deprel)
    if (role === undefined) continue
    mentions.push({
      entity: entityKey(token.form, token.lemma, surface),
      role,
      token_index: token.id - 1,
    })
  }
  return { tokens, mentions }
}

export function* convert(
  lines: Iterable<string>,
  options: ConvertOptions = {},
): Generator<InterchangeDocument> {
  const surface = options.surface ?? false
  let current: InterchangeDocument | undefined
  let sawMarker = false
  let warned = false

  for (const parsed of parseConllu(lines)) {
    if (parsed.newdocId !== undefined) {
      sawMarker = true
      if (current) yield current
      current = { doc_id: parsed.newdocId, sentences: [] }
    } else if (!current) {
      if (!sawMarker && !warned) {
        warned = true
        options.warn?.('no "# newdoc id" markers; treating the whole input as one document')
      }
      current = { doc_id: options.fallbackDocId ?? 'doc-1', sentences: [] }
    }
    current.sentences.push(toSentence(parsed, surface))
  }
  if (current) yield current
}

export function convertToJsonl(lines: Iterable<string>, options: ConvertOptions = {}): string {
  let out = ''
  for (const doc of convert(lines, options)) {
    out += JSON.stringify(doc) + '\n'
  }
  return out
}
