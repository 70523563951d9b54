/**
 * Minimal CoNLL-U reader: token rows, sentence boundaries, document
 * markers. Multiword-token ranges (1-2) and empty nodes (1.1) carry no
 * syntactic word of their own and are skipped.
 */

export interface ConlluToken {
  id: number
  form: string
  lemma: string
  upos: string
  head: number
  deprel: string
}

export interface ConlluSentence {
  tokens: ConlluToken[]
  /** value of "# newdoc id = ..." when this sentence opens a document */
  newdocId?: string
}

export class ConlluFormatError extends Error {
  constructor(message: string, readonly lineNo: number) {
    super(`line ${lineNo}: ${message}`)
    this.name = 'ConlluFormatError'
  }
}

const RANGE_ID = /^\d+-\d+$/
const EMPTY_ID = /^\d+\.\d+$/
const NEWDOC = /^#\s*newdoc(?:\s+id\s*=\s*(.*))?$/

export function* parseConllu(lines: Iterable<string>): Generator<ConlluSentence> {
  let tokens: ConlluToken[] = []
  let newdocId: string | undefined
  let pendingNewdoc: string | undefined
  let lineNo = 0

  const finish = (): ConlluSentence | undefined => {
    if (tokens.length === 0) {
      return undefined
    }
    for (const token of tokens) {
      if (token.head > tokens.length) {
        throw new ConlluFormatError(
          `head ${token.head} of token ${token.id} points past the sentence`,
          lineNo,
        )
      }
    }
    const sentence = { tokens, newdocId }
    tokens = []
    newdocId = undefined
    return sentence
  }

  for (const rawLine of lines) {
    lineNo += 1
    const line = rawLine.replace(/\r$/, '')
    if (line.trim() === '') {
      const sentence = finish()
      if (sentence) yield sentence
      continue
    }
    if (line.startsWith('#')) {
      const match = NEWDOC.exec(line.trim())
      if (match) {
        pendingNewdoc = (match[1] ?? '').trim() || 'untitled'
      }
      continue
    }
    const cols = line.split('\t')
    if (cols.length !== 10) {
      throw new ConlluFormatError(`expected 10 tab-separated fields, got ${cols.length}`, lineNo)
    }
    const [idText, form, lemma, upos, , , headText, deprel] = cols
    if (RANGE_ID.test(idText) || EMPTY_ID.test(idText)) {
      continue
    }
    const id = Number(idText)
    if (!Number.isInteger(id) || id < 1) {
      throw new ConlluFormatError(`bad token id ${JSON.stringify(idText)}`, lineNo)
    }
    if (tokens.length === 0 && pendingNewdoc !== undefined) {
      newdocId = pendingNewdoc
      pendingNewdoc = undefined
    }
    if (id !== tokens.length + 1) {
      throw new ConlluFormatError(`token id ${id} where ${tokens.length + 1} expected`, lineNo)
    }
    const head = Number(headText)
    if (!Number.isInteger(head) || head < 0) {
      throw new ConlluFormatError(`bad head ${JSON.stringify(headText)}`, lineNo)
    }
    tokens.push({ id, form, lemma, upos, head, deprel })
  }
  const sentence = finish()
  if (sentence) yield sentence
}
