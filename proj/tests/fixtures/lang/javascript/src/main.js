import { add, Counter } from './math.js';
import * as lim from './limits.js';
import defaultLogger from './logger.js';

export function run(values) {
  const c = new Counter(0);
  for (const v of values) {
    c.increment(v);
  }
  const total = values.reduce((acc, v) => add(acc, v), 0);
  defaultLogger(lim.clamp(total));
  function finish() {
    return c.value;
  }
  return finish();
}
