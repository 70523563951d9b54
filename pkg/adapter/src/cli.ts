#!/usr/bin/env node
/**
 * convert --in parses.conllu --out corpus.jsonl [--surface]
 *
 * Reads stdin / writes stdout when the paths are omitted.
 */

import * as fs from 'node:fs'
import * as path from 'node:path'
import * as process from 'node:process'
import { pathToFileURL } from 'node:url'

import { convert } from './convert.js'

interface CliArgs {
  in?: string
  out?: string
  surface: boolean
}

function parseArgs(argv: string[]): CliArgs {
  const args: CliArgs = { surface: false }
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i]
    switch (flag) {
      case '--in':
        args.in = argv[++i]
        break
      case '--out':
        args.out = argv[++i]
        break
      case '--surface':
        args.surface = true
        break
      case '--help':
      case '-h':
        process.stdout.write(
          'usage: conllu-convert [--in parses.conllu] [--out corpus.jsonl] [--surface]\n',
        )
        process.exit(0)
        break
      default:
        process.stderr.write(`unknown flag: ${flag}\n`)
        process.exit(2)
    }
  }
  return args
}

function readInput(fromPath?: string): string {
  if (fromPath && fromPath !== '-') {
    return fs.readFileSync(fromPath, 'utf-8')
  }
  return fs.readFileSync(0, 'utf-8')
}

export function main(argv: string[] = process.argv.slice(2)): void {
  const args = parseArgs(argv)
  const text = readInput(args.in)
  const fallback = args.in && args.in !== '-'
    ? path.basename(args.in).replace(/\.[^.]*$/, '')
    : 'doc-1'

  const sink =
    args.out && args.out !== '-' ? fs.createWriteStream(args.out) : process.stdout
  try {
    for (const doc of convert(text.split('\n'), {
      surface: args.surface,
      fallbackDocId: fallback,
      warn: (message) => process.stderr.write(`warning: ${message}\n`),
    })) {
      sink.write(JSON.stringify(doc) + '\n')
    }
  } finally {
    if (sink !== process.stdout) {
      sink.end()
    }
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  main()
}
