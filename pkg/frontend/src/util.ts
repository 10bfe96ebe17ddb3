// Small DOM and formatting helpers. Formatting only: the numbers themselves
// always come from service responses.

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

export function fmtMetric(value: number): string {
  return value.toFixed(4);
}

export function fmtThreshold(value: number): string {
  return value.toFixed(3);
}

export function fmtCost(value: number, currency: string): string {
  const amount = Number.isInteger(value) ? value.toString() : value.toFixed(2);
  return currency ? `${amount} ${currency}` : amount;
}

export const EVALUATE_DEBOUNCE_MS = 150;
export const JOB_POLL_MS = 500;

export function debounce<A extends unknown[]>(fn: (...args: A) => void, waitMs: number): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | null = null;
  return (...args: A) => {
    if (handle !== null) {
      clearTimeout(handle);
    }
    handle = setTimeout(() => {
      handle = null;
      fn(...args);
    }, waitMs);
  };
}
