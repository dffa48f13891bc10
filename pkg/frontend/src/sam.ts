// SAM pictogram rows: 9-point valence (frown -> smile) and arousal
// (sleepy -> energized) scales. Geometry is computed here as plain data so
// tests can check the nine levels are distinct without a DOM.

export type SamScale = "valence" | "arousal";

export interface SamFaceSpec {
  level: number;
  /** mouth curvature: -1 deep frown .. +1 wide smile (valence only) */
  mouthCurve: number;
  /** eye openness radius in px */
  eyeRadius: number;
  /** number of energy rays around the head (arousal only) */
  rays: number;
}

export function samFaceSpec(scale: SamScale, level: number): SamFaceSpec {
  if (!Number.isInteger(level) || level < 1 || level > 9) {
    throw new Error(`SAM level must be an integer 1..9, got ${level}`);
  }
  const t = (level - 1) / 8; // 0..1
  if (scale === "valence") {
    return { level, mouthCurve: -1 + 2 * t, eyeRadius: 2.5, rays: 0 };
  }
  return { level, mouthCurve: 0, eyeRadius: 1.2 + 2.6 * t, rays: Math.round(t * 8) };
}

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

/** One 28x28 manikin face for the given scale and level. */
export function renderSamFace(scale: SamScale, level: number): SVGSVGElement {
  const spec = samFaceSpec(scale, level);
  const svg = svgEl("svg", { viewBox: "0 0 28 28", width: 36, height: 36 });
  svg.appendChild(
    svgEl("circle", { cx: 14, cy: 14, r: 10, fill: "none", stroke: "#333", "stroke-width": 1.5 }),
  );
  svg.appendChild(svgEl("circle", { cx: 10, cy: 11.5, r: spec.eyeRadius, fill: "#333" }));
  svg.appendChild(svgEl("circle", { cx: 18, cy: 11.5, r: spec.eyeRadius, fill: "#333" }));
  // mouth: quadratic curve bending with the valence level
  const bend = 18 + spec.mouthCurve * -4.5;
  svg.appendChild(
    svgEl("path", {
      d: `M 9.5 18 Q 14 ${bend} 18.5 18`,
      fill: "none",
      stroke: "#333",
      "stroke-width": 1.5,
      "stroke-linecap": "round",
    }),
  );
  for (let i = 0; i < spec.rays; i++) {
    const angle = (i / spec.rays) * 2 * Math.PI - Math.PI / 2;
    const x1 = 14 + Math.cos(angle) * 11.5;
    const y1 = 14 + Math.sin(angle) * 11.5;
    const x2 = 14 + Math.cos(angle) * 13.5;
    const y2 = 14 + Math.sin(angle) * 13.5;
    svg.appendChild(
      svgEl("line", { x1, y1, x2, y2, stroke: "#333", "stroke-width": 1.2 }),
    );
  }
  return svg;
}

export interface SamRowHandle {
  element: HTMLElement;
  selected: () => number | null;
  reset: () => void;
}

/** A labelled row of nine selectable pictograms. */
export function buildSamRow(
  scale: SamScale,
  label: string,
  onSelect: (level: number) => void,
): SamRowHandle {
  const row = document.createElement("div");
  row.className = `sam-row sam-${scale}`;
  const caption = document.createElement("div");
  caption.className = "sam-label";
  caption.textContent = label;
  row.appendChild(caption);

  let selected: number | null = null;
  const buttons: HTMLButtonElement[] = [];
  const strip = document.createElement("div");
  strip.className = "sam-strip";
  for (let level = 1; level <= 9; level++) {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "sam-option";
    button.dataset.level = String(level);
    button.setAttribute("aria-label", `${label} ${level}`);
    button.appendChild(renderSamFace(scale, level));
    const digit = document.createElement("span");
    digit.textContent = String(level);
    button.appendChild(digit);
    button.addEventListener("click", () => {
      selected = level;
      for (const b of buttons) b.classList.toggle("selected", b === button);
      onSelect(level);
    });
    buttons.push(button);
    strip.appendChild(button);
  }
  row.appendChild(strip);
  return {
    element: row,
    selected: () => selected,
    reset: () => {
      selected = null;
      for (const b of buttons) b.classList.remove("selected");
    },
  };
}
