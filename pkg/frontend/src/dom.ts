// Small DOM helpers; all rendering goes through these.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'class') {
      node.className = value;
    } else {
      node.setAttribute(key, value);
    }
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function button(label: string, onClick: () => void,
                       className = 'btn'): HTMLButtonElement {
  const node = el('button', { class: className }, [label]);
  node.addEventListener('click', onClick);
  return node;
}

export function table(headers: string[], rows: string[][]): HTMLTableElement {
  const head = el('tr', {}, headers.map((h) => el('th', {}, [h])));
  const body = rows.map((row) => el('tr', {}, row.map((cell) => el('td', {}, [cell]))));
  return el('table', { class: 'grid' }, [el('thead', {}, [head]), el('tbody', {}, body)]);
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}
