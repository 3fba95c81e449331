#!/usr/bin/env node
import { readFileSync } from "fs";
import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { render } from "./render.js";
import { FigureSpecSchema } from "./types.js";

export async function main(argv: string[]): Promise<number> {
  let exitCode = 0;
  await yargs(argv)
    .command(
      "render",
      "render a figure from a JSON figure spec",
      (y) =>
        y.option("spec", {
          type: "string",
          demandOption: true,
          describe: "path to the FigureSpec JSON document",
        }),
      (args) => {
        try {
          const raw = JSON.parse(readFileSync(args.spec, "utf-8"));
          const spec = FigureSpecSchema.parse(raw);
          const out = render(spec);
          console.log(`wrote ${out}`);
        } catch (err) {
          console.error(`error: ${(err as Error).message}`);
          exitCode = 1;
        }
      }
    )
    .demandCommand(1)
    .strict()
    .fail((msg, err) => {
      console.error(`error: ${msg ?? err?.message}`);
      exitCode = 1;
    })
    .exitProcess(false)
    .parseAsync();
  return exitCode;
}

const isDirect =
  process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (isDirect) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
