/** Figure builders over the simulator's CSV artifacts.
 *
 * These scripts never recompute physics: fitted lines are drawn from the
 * regression coefficients in the tables CSV, exclusion flags come from the
 * series CSVs, and breakdown markers from the local-slope CSV.
 */

import type * as echarts from "echarts";

type EChartsOption = echarts.EChartsOption;
type SeriesOption = echarts.SeriesOption;
import { readCsv, requireColumns, MissingInputError, Table } from "./csv.js";

export interface FigureSpec {
  inputs: string[];
  output: string;
  title?: string;
}

export function checkInputsExist(spec: FigureSpec): void {
  // readCsv throws MissingInputError on absent files; probe them all upfront
  for (const path of spec.inputs) {
    readCsv(path);
  }
}

/** Photon-number trace with step-boundary markers (one series per run). */
export function nbarOption(paths: string[], period?: number): EChartsOption {
  if (paths.length === 0) throw new MissingInputError("no nbar inputs");
  const series: SeriesOption[] = [];
  for (const path of paths) {
    const table = readCsv(path);
    requireColumns(table, ["time_us", "nbar"], path);
    series.push({
      type: "line",
      name: path,
      showSymbol: true,
      data: table.time_us.map((t, i) => [t, table.nbar[i]]),
    });
  }
  const markers =
    period !== undefined
      ? {
          markLine: {
            symbol: "none",
            silent: true,
            lineStyle: { type: "dashed" as const, opacity: 0.4 },
            data: rangeMarkers(series[0], period),
          },
        }
      : {};
  Object.assign(series[0], markers);
  return {
    title: { text: "mean photon number vs time" },
    xAxis: { type: "value", name: "t (us)" },
    yAxis: { type: "value", name: "nbar" },
    legend: { show: paths.length > 1 },
    series,
  };
}

function rangeMarkers(first: SeriesOption, period: number) {
  const data = (first as { data: [number, number][] }).data;
  const tMax = data[data.length - 1][0];
  const marks = [];
  for (let t = period; t < tMax + 1e-12; t += period) {
    marks.push({ xAxis: t });
  }
  return marks;
}

export interface SweepSeriesInput {
  label: string;
  seriesPath: string;
  column: "sigma_h" | "sigma_qp";
}

interface FitRow {
  kappa: number;
  s: number;
  intercept: number;
}

export function readFitTable(tablePath: string): FitRow[] {
  const table = readCsv(tablePath);
  requireColumns(table, ["kappa_over_2pi_MHz", "s", "ln_sigma0"], tablePath);
  return table.kappa_over_2pi_MHz.map((kappa, i) => ({
    kappa,
    s: table.s[i],
    intercept: table.ln_sigma0[i],
  }));
}

/** Fitted power law evaluated from stored coefficients only. */
export function fitLinePoints(
  fit: { s: number; intercept: number },
  times: number[],
): [number, number][] {
  return times.map((t) => [t, Math.exp(fit.intercept + fit.s * Math.log(t))]);
}

/** Ln-ln spread-vs-time for a decoherence sweep, with stored fit lines.
 *
 * Saturated points (excluded = 1) are drawn hollow and the fit lines span
 * only the retained points.
 */
export function sigmaSweepOption(
  inputs: SweepSeriesInput[],
  tablePath: string,
): EChartsOption {
  if (inputs.length === 0) throw new MissingInputError("no sweep series");
  const fits = readFitTable(tablePath);
  const series: SeriesOption[] = [];
  inputs.forEach((input, idx) => {
    const table = readCsv(input.seriesPath);
    requireColumns(table, ["time_us", input.column, "excluded"],
                   input.seriesPath);
    const kept: [number, number][] = [];
    const hollow: [number, number][] = [];
    for (let i = 0; i < table.time_us.length; i++) {
      const t = table.time_us[i];
      const v = table[input.column][i];
      if (t <= 0 || !Number.isFinite(v)) continue;
      (table.excluded[i] ? hollow : kept).push([t, v]);
    }
    series.push({
      type: "scatter",
      name: input.label,
      data: kept,
    });
    if (hollow.length > 0) {
      series.push({
        type: "scatter",
        name: `${input.label} (saturated)`,
        itemStyle: { color: "transparent", borderColor: "#888" },
        data: hollow,
      });
    }
    const fit = fits[idx];
    if (fit !== undefined && kept.length > 0) {
      series.push({
        type: "line",
        name: `${input.label} fit`,
        showSymbol: false,
        data: fitLinePoints(fit, kept.map((p) => p[0])),
      });
    }
  });
  return {
    title: { text: "walker spread vs time (log-log)" },
    xAxis: { type: "log", name: "t (us)" },
    yAxis: { type: "log", name: "sigma" },
    legend: { show: inputs.length > 1 },
    series,
  };
}

export interface ComparisonInput {
  label: string;
  seriesPath: string;
  column: string;
  xColumn?: string;
  optional?: boolean;
}

/** Fixed-vs-adaptive comparison with a reference walk overlay and an
 * optional breakdown-step annotation taken from the local-slope CSV. */
export function fixedVsAdaptiveOption(
  inputs: ComparisonInput[],
  localSlopesPath?: string,
): { option: EChartsOption; warnings: string[] } {
  const warnings: string[] = [];
  const series: SeriesOption[] = [];
  for (const input of inputs) {
    let table: Table;
    try {
      table = readCsv(input.seriesPath);
    } catch (err) {
      if (input.optional && err instanceof MissingInputError) {
        warnings.push(`missing optional series: ${input.seriesPath}`);
        continue;
      }
      throw err;
    }
    const xName = input.xColumn ?? "step";
    requireColumns(table, [xName, input.column], input.seriesPath);
    const data: [number, number][] = [];
    for (let i = 0; i < table[xName].length; i++) {
      const x = table[xName][i];
      const v = table[input.column][i];
      if (x > 0 && Number.isFinite(v)) data.push([x, v]);
    }
    series.push({ type: "line", name: input.label, data });
  }
  if (series.length === 0) {
    throw new MissingInputError("no series available for the comparison plot");
  }
  let breakdown: number | undefined;
  if (localSlopesPath !== undefined) {
    const slopes = readCsv(localSlopesPath);
    requireColumns(slopes, ["step", "breakdown"], localSlopesPath);
    const idx = slopes.breakdown.findIndex((b) => b === 1);
    if (idx >= 0) breakdown = slopes.step[idx];
  }
  if (breakdown !== undefined) {
    Object.assign(series[0], {
      markLine: {
        symbol: "none",
        silent: true,
        label: { formatter: `breakdown @ step ${breakdown}` },
        data: [{ xAxis: breakdown }],
      },
    });
  }
  return {
    option: {
      title: { text: "spread vs step: fixed vs adaptive pulses" },
      xAxis: { type: "log", name: "step" },
      yAxis: { type: "log", name: "sigma" },
      legend: { show: true },
      series,
    },
    warnings,
  };
}
