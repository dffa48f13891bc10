// Closeness scale: seven pairs of circles whose overlap grows with the
// rating (1 = separate, 7 = almost fully merged).

export interface IosGeometry {
  option: number;
  /** horizontal distance between the two circle centers */
  centerDistance: number;
  radius: number;
  /** overlap fraction 0..1 of the diameter */
  overlap: number;
}

const RADIUS = 16;
const MAX_DISTANCE = 2 * RADIUS + 4; // option 1: a visible gap
const MIN_DISTANCE = 6; // option 7: nearly concentric

export function iosGeometry(option: number): IosGeometry {
  if (!Number.isInteger(option) || option < 1 || option > 7) {
    throw new Error(`closeness option must be an integer 1..7, got ${option}`);
  }
  const t = (option - 1) / 6;
  const centerDistance = MAX_DISTANCE - t * (MAX_DISTANCE - MIN_DISTANCE);
  const overlap = Math.max(0, (2 * RADIUS - centerDistance) / (2 * RADIUS));
  return { option, centerDistance, radius: RADIUS, overlap };
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function renderIosOption(option: number): SVGSVGElement {
  const geo = iosGeometry(option);
  const width = 2 * geo.radius + MAX_DISTANCE + 8;
  const cy = geo.radius + 4;
  const cx1 = width / 2 - geo.centerDistance / 2;
  const cx2 = width / 2 + geo.centerDistance / 2;
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${2 * cy}`);
  svg.setAttribute("width", "84");
  svg.setAttribute("height", "44");
  for (const [cx, label] of [
    [cx1, "self"],
    [cx2, "other"],
  ] as const) {
    const circle = document.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", String(cx));
    circle.setAttribute("cy", String(cy));
    circle.setAttribute("r", String(geo.radius));
    circle.setAttribute("fill", "none");
    circle.setAttribute("stroke", "#333");
    circle.setAttribute("stroke-width", "1.5");
    circle.dataset.role = label;
    svg.appendChild(circle);
  }
  return svg;
}

export interface IosRowHandle {
  element: HTMLElement;
  selected: () => number | null;
  reset: () => void;
}

export function buildIosRow(onSelect: (option: number) => void): IosRowHandle {
  const row = document.createElement("div");
  row.className = "ios-row";
  let selected: number | null = null;
  const buttons: HTMLButtonElement[] = [];
  for (let option = 1; option <= 7; option++) {
    const button = document.createElement("button");
    button.type = "button";
    button.className = "ios-option";
    button.dataset.option = String(option);
    button.setAttribute("aria-label", `closeness ${option}`);
    button.appendChild(renderIosOption(option));
    const digit = document.createElement("span");
    digit.textContent = String(option);
    button.appendChild(digit);
    button.addEventListener("click", () => {
      selected = option;
      for (const b of buttons) b.classList.toggle("selected", b === button);
      onSelect(option);
    });
    buttons.push(button);
    row.appendChild(button);
  }
  return {
    element: row,
    selected: () => selected,
    reset: () => {
      selected = null;
      for (const b of buttons) b.classList.remove("selected");
    },
  };
}
