#!/usr/bin/env node
/**
 * export-embeddings: encode a corpus with a multilingual sentence
 * transformer and write an EMB1 file, or verify an existing one.
 *
 *   export-embeddings --model <id> --input <txt> --output <emb1> [--batch-size N]
 *   export-embeddings verify <emb1>
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { loadEncoder, resolveModel, UnknownModel } from "./encoder.js";
import { EncodeFailure, runExport } from "./export.js";
import { Emb1FormatError } from "./emb1.js";
import { formatSummary, verifyFile } from "./verify.js";

async function exportCommand(argv: {
  model: string;
  input: string;
  output: string;
  batchSize: number;
}): Promise<void> {
  resolveModel(argv.model); // fail fast on unknown ids before loading anything
  const encode = await loadEncoder(argv.model);
  const summary = await runExport(
    { inputPath: argv.input, outputPath: argv.output, batchSize: argv.batchSize },
    encode,
  );
  console.error(`encoded ${summary.nDocs} documents at dim ${summary.dim}`);
  console.log(summary.outputPath);
}

function verifyCommand(path: string): void {
  const summary = verifyFile(path);
  console.log(formatSummary(summary));
  if (summary.nanCount > 0) {
    throw new Emb1FormatError(`${path}: ${summary.nanCount} NaN values`);
  }
}

async function main(): Promise<void> {
  await yargs(hideBin(process.argv))
    .scriptName("export-embeddings")
    .command(
      "$0",
      "encode a corpus into an EMB1 embedding file",
      (y) =>
        y
          .option("model", { type: "string", demandOption: true, describe: "encoder model id" })
          .option("input", { type: "string", demandOption: true, describe: "corpus text file" })
          .option("output", { type: "string", demandOption: true, describe: "EMB1 output path" })
          .option("batch-size", { type: "number", default: 32 }),
      async (argv) =>
        exportCommand({
          model: argv.model,
          input: argv.input,
          output: argv.output,
          batchSize: argv["batch-size"],
        }),
    )
    .command(
      "verify <path>",
      "print n_docs, dim, per-dim mean/std and NaN count of an EMB1 file",
      (y) => y.positional("path", { type: "string", demandOption: true }),
      (argv) => verifyCommand(argv.path as string),
    )
    .strict()
    .fail((msg, err) => {
      console.error(`error: ${err ? err.message : msg}`);
      process.exit(exitCodeFor(err));
    })
    .parseAsync();
}

function exitCodeFor(err: Error | undefined): number {
  if (!err || err instanceof UnknownModel) {
    return 2; // usage / configuration
  }
  if (err instanceof Emb1FormatError || err instanceof EncodeFailure) {
    return 3; // data
  }
  return 1;
}

main();
