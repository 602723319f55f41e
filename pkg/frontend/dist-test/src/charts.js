/** SVG bar charts built from parsed report payloads. Pure string builders so
 * the numbers on screen are testable without a browser. */
import { histogramTotal, yearSeriesTotal } from "./tsv.js";
const PALETTE = ["#4363d8", "#e6194b", "#3cb44b", "#f58231", "#911eb4", "#46f0f0"];
function esc(text) {
    return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}
function bar(x, y, w, h, fill, title) {
    return (`<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${w.toFixed(2)}" ` +
        `height="${h.toFixed(2)}" fill="${fill}" opacity="0.75"><title>${esc(title)}</title></rect>`);
}
/** Overlayed per-seed histograms; the N= caption states the count total of the
 * first block so conservation is visible on screen. */
export function histogramSvg(hists, width = 640, height = 240) {
    if (hists.length === 0)
        throw new Error("nothing to chart");
    const pad = 28;
    const maxCount = Math.max(1, ...hists.flatMap((h) => h.bins.map((b) => b.count)));
    const lows = hists.flatMap((h) => h.bins.map((b) => b.low));
    const highs = hists.flatMap((h) => h.bins.map((b) => b.high));
    const lo = Math.min(...lows);
    const hi = Math.max(...highs);
    const span = hi - lo || 1;
    const innerW = width - 2 * pad;
    const innerH = height - 2 * pad;
    const parts = [];
    hists.forEach((h, i) => {
        const fill = PALETTE[i % PALETTE.length];
        for (const b of h.bins) {
            if (b.count === 0)
                continue;
            const x = pad + ((b.low - lo) / span) * innerW;
            const w = Math.max(1, ((b.high - b.low) / span) * innerW);
            const barH = (b.count / maxCount) * innerH;
            parts.push(bar(x, pad + innerH - barH, w, barH, fill, `${h.seedRef} [${b.low}, ${b.high}): ${b.count}`));
        }
    });
    const caption = `${hists[0].metric} · N=${histogramTotal(hists[0])}`;
    const legend = hists
        .map((h, i) => `<tspan fill="${PALETTE[i % PALETTE.length]}">${esc(h.seedRef)}</tspan>`)
        .join(" ");
    return (`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="chart histogram">` +
        `<text x="${pad}" y="16" class="caption" data-total="${histogramTotal(hists[0])}">${esc(caption)}</text>` +
        `<text x="${width - pad}" y="16" text-anchor="end" class="legend">${legend}</text>` +
        parts.join("") +
        `<line x1="${pad}" y1="${pad + innerH}" x2="${width - pad}" y2="${pad + innerH}" stroke="#555"/>` +
        `</svg>`);
}
export function yearSeriesSvg(ys, width = 640, height = 240) {
    const pad = 28;
    const innerW = width - 2 * pad;
    const innerH = height - 2 * pad;
    const years = ys.years;
    const maxCount = Math.max(1, ...years.map((y) => y.count));
    const minYear = years.length ? years[0].year : 0;
    const maxYear = years.length ? years[years.length - 1].year : 1;
    const span = Math.max(1, maxYear - minYear + 1);
    const barW = Math.max(1, innerW / span - 1);
    const parts = years.map((y) => {
        const x = pad + ((y.year - minYear) / span) * innerW;
        const h = (y.count / maxCount) * innerH;
        return bar(x, pad + innerH - h, barW, h, PALETTE[0], `${y.year}: ${y.count}`);
    });
    const caption = `${ys.metric} · top ${ys.percentile}% · N=${yearSeriesTotal(ys)}`;
    return (`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" class="chart year-series">` +
        `<text x="${pad}" y="16" class="caption" data-total="${yearSeriesTotal(ys)}">${esc(caption)}</text>` +
        parts.join("") +
        `<line x1="${pad}" y1="${pad + innerH}" x2="${width - pad}" y2="${pad + innerH}" stroke="#555"/>` +
        (years.length
            ? `<text x="${pad}" y="${height - 6}" class="tick">${minYear}</text>` +
                `<text x="${width - pad}" y="${height - 6}" text-anchor="end" class="tick">${maxYear}</text>`
            : "") +
        `</svg>`);
}
/** The total the chart displays, for checking against the payload. */
export function displayedTotal(svg) {
    const m = svg.match(/data-total="(\d+)"/);
    if (!m)
        throw new Error("chart carries no total");
    return Number(m[1]);
}
