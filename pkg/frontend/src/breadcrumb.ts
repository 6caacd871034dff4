/** Navigation path; clicking a segment rolls the view back up to it. */

export class Breadcrumb {
  constructor(
    private readonly container: HTMLElement,
    private readonly onRollUp: (length: number) => void,
  ) {}

  render(path: string[]): void {
    const doc = this.container.ownerDocument;
    const nav = doc.createElement("nav");
    nav.className = "breadcrumb";
    path.forEach((segment, i) => {
      if (i > 0) nav.appendChild(doc.createTextNode(" / "));
      const el = doc.createElement("a");
      el.textContent = segment;
      el.dataset.depth = String(i + 1);
      if (i < path.length - 1) {
        el.href = "#";
        el.addEventListener("click", (ev) => {
          ev.preventDefault();
          this.onRollUp(i + 1);
        });
      } else {
        el.className = "current";
      }
      nav.appendChild(el);
    });
    this.container.replaceChildren(nav);
  }
}
