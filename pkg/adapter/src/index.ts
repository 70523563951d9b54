export { ConlluFormatError, parseConllu } from './conllu.js'
export type { ConlluSentence, ConlluToken } from './conllu.js'
export { convert, convertToJsonl, entityKey, mentionRole } from './convert.js'
export type {
  ConvertOptions,
  InterchangeDocument,
  InterchangeSentence,
  Mention,
} from './convert.js'
