/** Figure CLI:
 *
 *   node dist/cli.js nbar --input run/nbar.csv --output fig2.svg [--period P]
 *   node dist/cli.js sigma-sweep --sweep-dir sweep --column sigma_h \
 *        --table sweep/table1.csv --output fig3a.svg
 *   node dist/cli.js fixed-vs-adaptive --series label=path:column ... \
 *        [--local-slopes path] --output fig4.svg
 */

import { readdirSync } from "node:fs";
import { join } from "node:path";
import {
  ComparisonInput,
  SweepSeriesInput,
  fixedVsAdaptiveOption,
  nbarOption,
  sigmaSweepOption,
} from "./figures.js";
import { renderToSvgFile } from "./render.js";

function parseFlags(argv: string[]): Map<string, string[]> {
  const flags = new Map<string, string[]>();
  let key: string | null = null;
  for (const token of argv) {
    if (token.startsWith("--")) {
      key = token.slice(2);
      if (!flags.has(key)) flags.set(key, []);
    } else if (key !== null) {
      flags.get(key)!.push(token);
    }
  }
  return flags;
}

function single(flags: Map<string, string[]>, name: string,
                fallback?: string): string {
  const values = flags.get(name);
  if (values === undefined || values.length === 0) {
    if (fallback !== undefined) return fallback;
    throw new Error(`missing --${name}`);
  }
  return values[values.length - 1];
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  const flags = parseFlags(rest);
  try {
    if (command === "nbar") {
      const inputs = flags.get("input") ?? [];
      const period = flags.has("period")
        ? Number(single(flags, "period")) : undefined;
      const option = nbarOption(inputs, period);
      renderToSvgFile(option, single(flags, "output"));
    } else if (command === "sigma-sweep") {
      const sweepDir = single(flags, "sweep-dir");
      const column = single(flags, "column", "sigma_h") as
        SweepSeriesInput["column"];
      const kappaDirs = readdirSync(sweepDir)
        .filter((name) => name.startsWith("kappa_"))
        .sort((a, b) => Number(a.slice(6)) - Number(b.slice(6)));
      const inputs: SweepSeriesInput[] = kappaDirs.map((name) => ({
        label: name.replace("_", " = ") + " MHz",
        seriesPath: join(sweepDir, name, "series.csv"),
        column,
      }));
      const option = sigmaSweepOption(inputs, single(flags, "table"));
      renderToSvgFile(option, single(flags, "output"));
    } else if (command === "fixed-vs-adaptive") {
      const inputs: ComparisonInput[] = (flags.get("series") ?? []).map(
        (spec) => {
          const [label, rest2] = spec.split("=", 2);
          const [path, column] = rest2.split(":");
          return { label, seriesPath: path, column: column ?? "sigma_h" };
        });
      const optional = (flags.get("optional-series") ?? []).map((spec) => {
        const [label, rest2] = spec.split("=", 2);
        const [path, column] = rest2.split(":");
        return { label, seriesPath: path, column: column ?? "sigma_h",
                 optional: true };
      });
      const { option, warnings } = fixedVsAdaptiveOption(
        [...inputs, ...optional],
        flags.has("local-slopes") ? single(flags, "local-slopes") : undefined);
      for (const w of warnings) console.warn(`warning: ${w}`);
      renderToSvgFile(option, single(flags, "output"));
    } else {
      console.error(`unknown command: ${command ?? "(none)"}`);
      return 2;
    }
  } catch (err) {
    console.error(String(err));
    return 1;
  }
  return 0;
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") ?? false;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
