/** Live region for screen readers; every state change is spoken here. */
export class Announcer {
  readonly region: HTMLElement;
  readonly history: string[] = [];

  constructor(parent: HTMLElement) {
    this.region = document.createElement("div");
    this.region.className = "sr-only";
    this.region.setAttribute("role", "status");
    this.region.setAttribute("aria-live", "polite");
    parent.appendChild(this.region);
  }

  announce(text: string, assertive = false): void {
    this.region.setAttribute("aria-live", assertive ? "assertive" : "polite");
    // clearing first makes repeated identical messages re-announce
    this.region.textContent = "";
    this.region.textContent = text;
    this.history.push(text);
    if (this.history.length > 50) this.history.shift();
  }
}
