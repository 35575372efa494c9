/**
 * Trailing debounce with a max-wait equal to the interval: during a
 * continuous stream of calls the wrapped function still fires once per
 * `ms` window (so slider drags post steadily, bounded at 1000/ms per
 * second), and one final trailing call delivers the last value.
 */
export interface Debounced<A> {
  (value: A): void;
  cancel(): void;
  flush(): void;
}

export function debounce<A>(fn: (value: A) => void, ms: number): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  let last: A;
  let hasPending = false;

  const fire = () => {
    timer = undefined;
    if (hasPending) {
      hasPending = false;
      fn(last);
    }
  };

  const wrapped = (value: A) => {
    last = value;
    hasPending = true;
    // An armed timer is never reset: the window ends, the latest value fires.
    if (timer === undefined) {
      timer = setTimeout(fire, ms);
    }
  };
  wrapped.cancel = () => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
    hasPending = false;
  };
  wrapped.flush = () => {
    if (timer !== undefined) clearTimeout(timer);
    fire();
  };
  return wrapped;
}
